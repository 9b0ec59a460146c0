#include "palimpsest/service.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <thread>

#include "httplib.h"
#include "palimpsest/digest.hpp"
#include "palimpsest/error.hpp"
#include "palimpsest/report.hpp"
#include "palimpsest/unicode.hpp"
#include "report_json.hpp"

namespace palimpsest {

using nlohmann::json;

std::filesystem::path index_path(const CorpusStore& store, std::string_view corpus_id, const DetectionParams& params) {
  return store.corpus_dir(corpus_id) /
         ("index-nw" + std::to_string(params.n_w) + "-nh" + std::to_string(params.n_h) + ".plmp");
}

Engine::Engine(Config config, PipelineConfig pipeline)
    : config_(std::move(config)), pipeline_(std::move(pipeline)), store_(config_.root) {}

std::mutex& Engine::corpus_lock(std::string_view corpus_id) {
  std::lock_guard lock(mu_);
  auto it = corpus_locks_.find(corpus_id);
  if (it == corpus_locks_.end()) {
    it = corpus_locks_.emplace(std::string(corpus_id), std::make_unique<std::mutex>()).first;
  }
  return *it->second;
}

Corpus Engine::corpus(std::string_view corpus_id) const {
  if (!store_.exists(corpus_id)) throw DataError("unknown corpus: " + std::string(corpus_id));
  return store_.load(corpus_id);
}

std::shared_ptr<const AnalyzedCorpus> Engine::analyzed(std::string_view corpus_id) {
  Corpus c = corpus(corpus_id);
  std::lock_guard corpus_guard(corpus_lock(corpus_id));
  {
    std::lock_guard lock(mu_);
    if (auto it = analyses_.find(c.manifest_digest()); it != analyses_.end()) return it->second;
  }
  auto a = std::make_shared<const AnalyzedCorpus>(analyze(c, pipeline_));
  std::lock_guard lock(mu_);
  analyses_[c.manifest_digest()] = a;
  return a;
}

std::shared_ptr<const Index> Engine::index(std::string_view corpus_id, const DetectionParams& params) {
  params.validate();
  std::shared_ptr<const AnalyzedCorpus> a = analyzed(corpus_id);
  const std::string key = a->corpus_digest + "/" + a->pipeline_digest + "/" + std::to_string(params.n_w) + "/" +
                          std::to_string(params.n_h);
  std::lock_guard corpus_guard(corpus_lock(corpus_id));
  {
    std::lock_guard lock(mu_);
    if (auto it = indexes_.find(key); it != indexes_.end()) return it->second;
  }
  std::shared_ptr<const Index> built;
  const std::filesystem::path stored = index_path(store_, corpus_id, params);
  if (std::filesystem::exists(stored)) {
    try {
      Index loaded = Index::load(stored);
      if (loaded.corpus_digest() == a->corpus_digest && loaded.pipeline_digest() == a->pipeline_digest &&
          loaded.params().n_w == params.n_w && loaded.params().n_h == params.n_h) {
        built = std::make_shared<const Index>(std::move(loaded));
      }
    } catch (const DataError&) {
      // stale or damaged: rebuild below
    }
  }
  if (!built) built = std::make_shared<const Index>(Index::build(*a, params));
  std::lock_guard lock(mu_);
  indexes_[key] = built;
  return built;
}

std::vector<PairReport> Engine::detect(std::string_view corpus_id, std::string_view a, std::string_view b,
                                       const DetectionParams& params) {
  params.validate();
  Corpus c = corpus(corpus_id);
  const std::string da = c.resolve(a).doc_id;
  std::shared_ptr<const AnalyzedCorpus> analysis = analyzed(corpus_id);
  std::shared_ptr<const Index> idx = index(corpus_id, params);
  if (b == "ALL") return detect_all(*idx, *analysis, da, params);
  const std::string db = c.resolve(b).doc_id;
  return {detect_pair(*idx, *analysis, da, db, params)};
}

std::string Engine::report_key(std::string_view corpus_id, std::string_view doc_a, std::string_view doc_b,
                               const DetectionParams& params) {
  std::shared_ptr<const AnalyzedCorpus> a = analyzed(corpus_id);
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& [stem, cls] : pipeline_.overrides) overrides.emplace_back(stem, std::string(strength_name(cls)));
  std::sort(overrides.begin(), overrides.end());
  std::string material = a->corpus_digest + "\n" + a->pipeline_digest + "\n" +
                         std::to_string(pipeline_.strength.weak_df) + "\n" +
                         std::to_string(pipeline_.strength.weak_rank) + "\n";
  for (const auto& [stem, cls] : overrides) material += stem + "\t" + cls + "\n";
  material += std::to_string(params.n_w) + "," + std::to_string(params.n_h) + "," + std::to_string(params.s_min) +
              "," + std::to_string(params.effective_splice_gap()) + "\n";
  material += std::string(doc_a) + "\n" + std::string(doc_b);
  return sha256_hex(material).substr(0, 16);
}

std::string_view job_status_name(JobStatus s) {
  switch (s) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
  }
  return "failed";
}

namespace {

struct StoredReport {
  std::string corpus_id;
  PairReport report;
  std::string body;  // render_report bytes
};

struct Job {
  std::string id;
  std::string corpus_id;
  std::string a;
  std::string b;
  DetectionParams params;
  JobStatus status = JobStatus::Pending;
  std::string error;
  std::vector<std::string> report_ids;
  std::size_t cache_hits = 0;
};

json error_body(const std::string& msg) { return {{"schema_version", kSchemaVersion}, {"error", msg}}; }

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

DetectionParams params_from_json(const json& j, const DetectionParams& defaults) {
  DetectionParams p = defaults;
  auto count = [&](const char* key, std::size_t& field) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw UsageError(std::string(key) + " must be a non-negative integer");
    }
    field = v.get<std::size_t>();
  };
  count("n_w", p.n_w);
  count("n_h", p.n_h);
  count("s_min", p.s_min);
  if (j.contains("splice_gap")) {
    const json& v = j.at("splice_gap");
    if (v.is_string() && v.get<std::string>() == "auto") {
      p.splice_gap.reset();
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
      p.splice_gap = v.get<std::size_t>();
    } else {
      throw UsageError("splice_gap must be \"auto\" or a non-negative integer");
    }
  }
  p.validate();
  return p;
}

std::size_t query_size(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw UsageError(std::string(key) + " must be a non-negative integer");
  return out;
}

}  // namespace

struct Service::Impl {
  Impl(Config config, PipelineConfig pipeline) : engine(std::move(config), std::move(pipeline)) {}

  Engine engine;
  httplib::Server server;
  bool bound = false;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> queue;
  std::map<std::string, Job> jobs;
  std::map<std::string, StoredReport> reports;
  std::size_t next_job = 1;
  std::atomic<std::size_t> computed{0};
  bool stopping = false;
  std::vector<std::thread> workers;

  void start_workers() {
    for (unsigned i = 0; i < std::max(1u, engine.config().workers); ++i) {
      workers.emplace_back([this] { worker(); });
    }
  }

  void shutdown() {
    {
      std::lock_guard lock(mu);
      stopping = true;
    }
    cv.notify_all();
    for (std::thread& t : workers) {
      if (t.joinable()) t.join();
    }
    workers.clear();
  }

  void worker() {
    while (true) {
      std::string id;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        id = queue.front();
        queue.pop_front();
        jobs[id].status = JobStatus::Running;
      }
      Job snapshot;
      {
        std::lock_guard lock(mu);
        snapshot = jobs[id];
      }
      try {
        std::vector<std::string> ids;
        std::size_t hits = 0;
        Corpus c = engine.corpus(snapshot.corpus_id);
        const std::string da = c.resolve(snapshot.a).doc_id;
        std::vector<std::string> targets;
        if (snapshot.b == "ALL") {
          for (const Document& d : c.documents()) {
            if (d.doc_id != da) targets.push_back(d.doc_id);
          }
        } else {
          targets.push_back(c.resolve(snapshot.b).doc_id);
        }
        for (const std::string& db : targets) {
          const std::string key = engine.report_key(snapshot.corpus_id, da, db, snapshot.params);
          {
            std::lock_guard lock(mu);
            if (reports.contains(key)) {
              ids.push_back(key);
              ++hits;
              continue;
            }
          }
          std::vector<PairReport> r = engine.detect(snapshot.corpus_id, da, db, snapshot.params);
          ++computed;
          StoredReport stored{snapshot.corpus_id, r.front(), render_report(r.front())};
          std::lock_guard lock(mu);
          reports.try_emplace(key, std::move(stored));
          ids.push_back(key);
        }
        std::lock_guard lock(mu);
        Job& j = jobs[id];
        j.report_ids = std::move(ids);
        j.cache_hits = hits;
        j.status = JobStatus::Done;
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        Job& j = jobs[id];
        j.error = e.what();
        j.status = JobStatus::Failed;
      }
    }
  }

  json job_json(const Job& j) {
    json reps = json::array();
    for (const std::string& rid : j.report_ids) {
      const StoredReport& s = reports.at(rid);
      json zones = json::array();
      for (const SimilarityZone& z : s.report.zones) zones.push_back(json_io::zone_json(z));
      reps.push_back({{"report_id", rid},
                      {"doc_a", s.report.doc_a},
                      {"doc_b", s.report.doc_b},
                      {"block_count", s.report.blocks.size()},
                      {"zone_count", s.report.zones.size()},
                      {"zones", zones}});
    }
    json out = {{"schema_version", kSchemaVersion},
                {"job_id", j.id},
                {"corpus", j.corpus_id},
                {"a", j.a},
                {"b", j.b},
                {"params", json_io::params_json(j.params)},
                {"status", job_status_name(j.status)},
                {"cache_hits", j.cache_hits},
                {"reports", reps}};
    if (j.status == JobStatus::Failed) out["error"] = j.error;
    return out;
  }

  template <typename Fn>
  auto guarded(Fn fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const UsageError& e) {
        send_json(res, error_body(e.what()), 400);
      } catch (const DataError& e) {
        const std::string msg = e.what();
        const bool missing = msg.rfind("unknown", 0) == 0 || msg.rfind("no such", 0) == 0;
        send_json(res, error_body(msg), missing ? 404 : 422);
      } catch (const json::exception& e) {
        send_json(res, error_body(std::string("malformed request: ") + e.what()), 400);
      } catch (const std::exception& e) {
        send_json(res, error_body(e.what()), 500);
      }
    };
  }

  void routes() {
    server.Get("/api/corpora", guarded([this](const httplib::Request&, httplib::Response& res) {
      json list = json::array();
      for (const std::string& id : engine.store().list()) {
        Corpus c = engine.corpus(id);
        json docs = json::array();
        for (const Document& d : c.documents()) {
          docs.push_back({{"doc_id", d.doc_id}, {"title", d.title}, {"author", d.author}, {"char_count", d.char_count}});
        }
        list.push_back({{"corpus_id", id}, {"manifest_digest", c.manifest_digest()}, {"documents", docs}});
      }
      send_json(res, {{"schema_version", kSchemaVersion}, {"corpora", list}});
    }));

    server.Get(R"(/api/corpora/([^/]+)/docs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      Corpus c = engine.corpus(req.matches[1].str());
      const Document& d = c.resolve(req.matches[2].str());
      const std::size_t from = std::min(query_size(req, "from", 0), d.char_count);
      const std::size_t to = std::clamp(query_size(req, "to", d.char_count), from, d.char_count);
      std::u32string text = unicode::decode_utf8(d.text);
      send_json(res, {{"schema_version", kSchemaVersion},
                      {"corpus_id", c.id()},
                      {"doc_id", d.doc_id},
                      {"title", d.title},
                      {"char_count", d.char_count},
                      {"from", from},
                      {"to", to},
                      {"text", unicode::encode_utf8(std::u32string_view(text).substr(from, to - from))}});
    }));

    server.Post("/api/jobs", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body);
      Job j;
      j.corpus_id = body.at("corpus").get<std::string>();
      j.a = body.at("a").get<std::string>();
      j.b = body.value("b", std::string("ALL"));
      j.params = params_from_json(body.value("params", json::object()), engine.config().params);
      Corpus c = engine.corpus(j.corpus_id);
      const std::string da = c.resolve(j.a).doc_id;
      if (j.b != "ALL" && c.resolve(j.b).doc_id == da) {
        throw UsageError("cannot compare a document with itself; ingest the second text as a separate document");
      }
      std::lock_guard lock(mu);
      j.id = "job-" + std::to_string(next_job++);
      jobs[j.id] = j;
      queue.push_back(j.id);
      cv.notify_one();
      send_json(res, {{"schema_version", kSchemaVersion}, {"job_id", j.id}, {"status", "pending"}}, 202);
    }));

    server.Get(R"(/api/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      auto it = jobs.find(req.matches[1].str());
      if (it == jobs.end()) throw DataError("unknown job: " + req.matches[1].str());
      send_json(res, job_json(it->second));
    }));

    server.Get(R"(/api/reports/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      auto it = reports.find(req.matches[1].str());
      if (it == reports.end()) throw DataError("unknown report: " + req.matches[1].str());
      res.set_content(it->second.body, "application/json");
    }));

    server.Get(R"(/api/reports/([^/]+)/zones)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      auto it = reports.find(req.matches[1].str());
      if (it == reports.end()) throw DataError("unknown report: " + req.matches[1].str());
      const PairReport& r = it->second.report;
      json zones = json::array();
      for (const SimilarityZone& z : r.zones) zones.push_back(json_io::zone_json(z));
      send_json(res, {{"schema_version", kSchemaVersion},
                      {"report_id", it->first},
                      {"doc_a", r.doc_a},
                      {"doc_b", r.doc_b},
                      {"a_length", r.a_length},
                      {"b_length", r.b_length},
                      {"params", json_io::params_json(r.params)},
                      {"zones", zones}});
    }));

    server.Get(R"(/api/blocks/([^/.]+)\.(\d+)/context)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string rid = req.matches[1].str();
      const std::size_t n = std::stoull(req.matches[2].str());
      const std::size_t radius = query_size(req, "radius", 200);
      StoredReport stored;
      {
        std::lock_guard lock(mu);
        auto it = reports.find(rid);
        if (it == reports.end()) throw DataError("unknown report: " + rid);
        stored = it->second;
      }
      if (n >= stored.report.blocks.size()) throw DataError("unknown block: " + rid + "." + std::to_string(n));
      auto analysis = engine.analyzed(stored.corpus_id);
      const AnalyzedDocument* a = analysis->find(stored.report.doc_a);
      const AnalyzedDocument* b = analysis->find(stored.report.doc_b);
      if (!a || !b) throw DataError("unknown document: corpus changed since the report was computed");
      json body = json_io::context_json(extract_context(stored.report.blocks[n], *a, *b, radius));
      body["report_id"] = rid;
      body["block_ref"] = rid + "." + std::to_string(n);
      send_json(res, body);
    }));
  }
};

Service::Service(Config config, PipelineConfig pipeline)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(pipeline))) {
  impl_->routes();
  impl_->start_workers();
}

Service::~Service() {
  impl_->server.stop();
  impl_->shutdown();
}

int Service::bind(const std::string& host, int port) {
  // SO_REUSEADDR only: SO_REUSEPORT would let a second server share the port.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  int bound_port = port;
  if (port == 0) {
    bound_port = impl_->server.bind_to_any_port(host);
    if (bound_port < 0) throw Error("cannot bind " + host + ": no free port");
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port) + " (port busy or unavailable)");
  }
  impl_->bound = true;
  return bound_port;
}

void Service::run() {
  if (!impl_->bound) throw UsageError("service is not bound");
  impl_->server.listen_after_bind();
}

void Service::stop() { impl_->server.stop(); }

std::size_t Service::computed_reports() const { return impl_->computed.load(); }

}  // namespace palimpsest
