#include <chrono>
#include <sstream>
#include <string>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "palimpsest/cli.hpp"
#include "palimpsest/error.hpp"
#include "palimpsest/report.hpp"
#include "palimpsest/service.hpp"
#include "support.hpp"

using namespace palimpsest;
using nlohmann::json;

namespace {

struct Server {
  testsupport::TempDir tmp;
  Config config;
  std::unique_ptr<Service> service;
  std::thread thread;
  int port = 0;

  Server() {
    config = load_config(testsupport::fixtures_dir() / "palimpsest.toml");
    config.root = tmp.path() / "root";
    CorpusStore store(config.root);
    std::vector<IngestRequest> reqs;
    for (const auto& p : testsupport::fixture_files()) reqs.push_back({p, std::nullopt, {}});
    store.ingest("demo", reqs);
    service = std::make_unique<Service>(config, pipeline_config(config));
    port = service->bind("127.0.0.1", 0);
    thread = std::thread([this] { service->run(); });
  }
  ~Server() {
    service->stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }
};

json wait_job(httplib::Client& c, const std::string& id) {
  for (int i = 0; i < 600; ++i) {
    auto r = c.Get("/api/jobs/" + id);
    REQUIRE(r);
    json j = json::parse(r->body);
    const std::string st = j.at("status");
    if (st == "done" || st == "failed") return j;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  FAIL("job did not finish");
  return {};
}

json post_job(httplib::Client& c, const json& body) {
  auto r = c.Post("/api/jobs", body.dump(), "application/json");
  REQUIRE(r);
  REQUIRE(r->status == 202);
  json j = json::parse(r->body);
  CHECK(j.at("status") == "pending");
  return wait_job(c, j.at("job_id"));
}

}  // namespace

TEST_CASE("http api") {
  Server s;
  httplib::Client c = s.client();

  auto corpora = c.Get("/api/corpora");
  REQUIRE(corpora);
  CHECK(corpora->status == 200);
  json cj = json::parse(corpora->body);
  REQUIRE(cj["corpora"].size() == 1);
  CHECK(cj["corpora"][0]["corpus_id"] == "demo");
  CHECK(cj["corpora"][0]["documents"].size() == 10);

  auto doc = c.Get("/api/corpora/demo/docs/plaideurs?from=4&to=9");
  REQUIRE(doc);
  CHECK(doc->status == 200);
  CHECK(json::parse(doc->body)["text"] == "rides");
  CHECK(c.Get("/api/corpora/demo/docs/nothing")->status == 404);

  json job = post_job(c, {{"corpus", "demo"}, {"a", "cid"}, {"b", "plaideurs"}});
  CHECK(job["status"] == "done");
  REQUIRE(job["reports"].size() == 1);
  const std::string rid = job["reports"][0]["report_id"];
  CHECK(job["reports"][0]["zone_count"] == 1);
  CHECK(job["cache_hits"] == 0);

  auto rep = c.Get("/api/reports/" + rid);
  REQUIRE(rep);
  CHECK(rep->status == 200);
  PairReport parsed = parse_report(rep->body);
  CHECK(parsed.blocks.size() == 1);

  SUBCASE("cli and api reports are identical") {
    std::ostringstream out, err;
    const std::vector<std::string> args{"--config", (testsupport::fixtures_dir() / "palimpsest.toml").string(), "--root",
                                        s.config.root.string(), "detect", "--corpus", "demo", "--a", "cid", "--b",
                                        "plaideurs"};
    REQUIRE(run_cli(args, out, err) == 0);
    CHECK(out.str() == rep->body);
  }

  SUBCASE("zones and context") {
    auto zones = c.Get("/api/reports/" + rid + "/zones");
    REQUIRE(zones);
    json zj = json::parse(zones->body);
    CHECK(zj["zones"].size() == 1);
    CHECK(zj["a_length"] == parsed.a_length);

    auto ctx = c.Get("/api/blocks/" + rid + ".0/context?radius=0");
    REQUIRE(ctx);
    CHECK(ctx->status == 200);
    json x = json::parse(ctx->body);
    Corpus corpus = CorpusStore(s.config.root).load("demo");
    AnalyzedCorpus analyzed = analyze(corpus, pipeline_config(s.config));
    ContextPair want = extract_context(parsed.blocks[0], *analyzed.find(parsed.doc_a), *analyzed.find(parsed.doc_b), 0);
    CHECK(x["a_excerpt"] == want.a_excerpt);
    CHECK(x["b_excerpt"] == want.b_excerpt);
    CHECK(x["a_highlights"].size() == 4);
    CHECK(x["block_ref"] == rid + ".0");
    CHECK(c.Get("/api/blocks/" + rid + ".9/context")->status == 404);
  }

  SUBCASE("identical job hits the cache") {
    const std::size_t computed = s.service->computed_reports();
    json again = post_job(c, {{"corpus", "demo"}, {"a", "cid"}, {"b", "plaideurs"}});
    CHECK(again["cache_hits"] == 1);
    CHECK(again["reports"][0]["report_id"] == rid);
    CHECK(s.service->computed_reports() == computed);
    CHECK(c.Get("/api/reports/" + rid)->body == rep->body);
  }

  SUBCASE("reversed pair and ALL") {
    json rev = post_job(c, {{"corpus", "demo"}, {"a", "plaideurs"}, {"b", "cid"}});
    PairReport back = parse_report(c.Get("/api/reports/" + rev["reports"][0]["report_id"].get<std::string>())->body);
    CHECK(mirror(back).blocks == parsed.blocks);
    json all = post_job(c, {{"corpus", "demo"}, {"a", "cid"}});
    CHECK(all["status"] == "done");
    CHECK(all["reports"].size() == 9);
    CHECK(all["cache_hits"] == 1);
  }

  SUBCASE("parameters in the job") {
    json other = post_job(c, {{"corpus", "demo"}, {"a", "cid"}, {"b", "plaideurs"}, {"params", {{"s_min", 5}}}});
    CHECK(other["reports"][0]["report_id"] != rid);
    CHECK(other["reports"][0]["block_count"] == 0);
  }

  SUBCASE("errors") {
    CHECK(c.Post("/api/jobs", "{", "application/json")->status == 400);
    CHECK(c.Post("/api/jobs", json{{"corpus", "demo"}, {"a", "cid"}, {"b", "cid"}}.dump(), "application/json")->status == 400);
    CHECK(c.Post("/api/jobs", json{{"corpus", "demo"}, {"a", "cid"}, {"params", {{"n_w", 0}}}}.dump(), "application/json")->status == 400);
    CHECK(c.Post("/api/jobs", json{{"corpus", "demo"}, {"a", "zzz"}}.dump(), "application/json")->status == 404);
    CHECK(c.Get("/api/jobs/job-999")->status == 404);
    CHECK(c.Get("/api/reports/ffff")->status == 404);
    CHECK(c.Get("/api/corpora/missing/docs/x")->status == 404);
  }
}

TEST_CASE("busy port") {
  Server s;
  Service other(s.config, pipeline_config(s.config));
  CHECK_THROWS_AS(other.bind("127.0.0.1", s.port), Error);
}
