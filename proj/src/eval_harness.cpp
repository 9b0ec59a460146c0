#include "palimpsest/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "palimpsest/error.hpp"
#include "fsutil.hpp"

namespace palimpsest {

namespace {

std::string cell(const std::optional<double>& v) { return format_ratio(v); }

}  // namespace

std::vector<GoldSpan> parse_gold(std::string_view jsonl) {
  std::vector<GoldSpan> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      GoldSpan g;
      g.doc_a = j.at("doc_a").get<std::string>();
      g.doc_b = j.at("doc_b").get<std::string>();
      g.a_span = {j.at("a_start").get<std::size_t>(), j.at("a_end").get<std::size_t>()};
      g.b_span = {j.at("b_start").get<std::size_t>(), j.at("b_end").get<std::size_t>()};
      g.label = j.value("label", "");
      g.questionable = j.value("questionable", false);
      if (g.a_span.empty() || g.b_span.empty()) throw DataError("empty span");
      out.push_back(std::move(g));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("gold line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("gold line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<GoldSpan> load_gold(const std::filesystem::path& path) { return parse_gold(fsutil::read_file(path)); }

std::vector<GoldSpan> resolve_gold(std::vector<GoldSpan> gold, const Corpus& corpus) {
  for (GoldSpan& g : gold) {
    const Document& a = corpus.resolve(g.doc_a);
    const Document& b = corpus.resolve(g.doc_b);
    if (a.doc_id == b.doc_id) throw DataError("gold span pairs document " + a.doc_id + " with itself");
    if (g.a_span.end > a.char_count || g.b_span.end > b.char_count) {
      throw DataError("gold span '" + g.label + "' lies outside its document");
    }
    g.doc_a = a.doc_id;
    g.doc_b = b.doc_id;
    if (g.doc_b < g.doc_a) {
      std::swap(g.doc_a, g.doc_b);
      std::swap(g.a_span, g.b_span);
    }
  }
  return gold;
}

MatchCounts match_gold(const std::vector<ReuseBlock>& blocks, const std::vector<GoldSpan>& gold,
                       const OverlapRule& rule) {
  MatchCounts c;
  for (const GoldSpan& g : gold) {
    if (g.questionable) continue;
    const bool hit = std::any_of(blocks.begin(), blocks.end(), [&](const ReuseBlock& b) {
      const double ra = static_cast<double>(overlap_length(b.a_span, g.a_span)) / static_cast<double>(g.a_span.length());
      const double rb = static_cast<double>(overlap_length(b.b_span, g.b_span)) / static_cast<double>(g.b_span.length());
      return ra > 0 && rb > 0 && ra >= rule.theta && rb >= rule.theta;
    });
    if (hit) {
      ++c.tp;
    } else {
      ++c.fn;
    }
  }
  for (const ReuseBlock& b : blocks) {
    const bool touches = std::any_of(gold.begin(), gold.end(), [&](const GoldSpan& g) {
      return overlap_length(b.a_span, g.a_span) > 0 && overlap_length(b.b_span, g.b_span) > 0;
    });
    if (!touches) ++c.fp;
  }
  return c;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

Metrics compute_metrics(const MatchCounts& counts, double beta) {
  Metrics m;
  m.counts = counts;
  m.beta = beta;
  if (counts.tp + counts.fp > 0) {
    m.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    m.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  if (m.precision && m.recall) m.f = f_beta(*m.precision, *m.recall, beta);
  return m;
}

std::string format_ratio(const std::optional<double>& v) {
  if (!v) return "nd";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

MatchCounts evaluate_counts(const AnalyzedCorpus& corpus, const Index& index, const std::vector<GoldSpan>& gold,
                            const DetectionParams& params, const OverlapRule& rule) {
  for (const GoldSpan& g : gold) {
    if (!index.doc_index(g.doc_a) || !index.doc_index(g.doc_b)) {
      throw DataError("gold span '" + g.label + "' references a document outside the corpus");
    }
  }
  MatchCounts total;
  const auto& ids = index.doc_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const std::string& lo = std::min(ids[i], ids[j]);
      const std::string& hi = std::max(ids[i], ids[j]);
      std::vector<GoldSpan> pair_gold;
      for (const GoldSpan& g : gold) {
        if (g.doc_a == lo && g.doc_b == hi) pair_gold.push_back(g);
      }
      PairReport r = detect_pair(index, corpus, lo, hi, params);
      total += match_gold(r.blocks, pair_gold, rule);
    }
  }
  return total;
}

Metrics evaluate(const AnalyzedCorpus& corpus, const std::vector<GoldSpan>& gold, const DetectionParams& params,
                 const EvalOptions& options) {
  IndexOptions io;
  io.threads = options.threads;
  Index index = Index::build(corpus, params, io);
  return compute_metrics(evaluate_counts(corpus, index, gold, params, options.overlap), options.beta);
}

const SweepCell& SweepResult::at(std::size_t n_w, std::size_t n_h) const {
  for (const SweepCell& c : cells) {
    if (c.n_w == n_w && c.n_h == n_h) return c;
  }
  throw UsageError("no sweep cell for n_w=" + std::to_string(n_w) + ", n_h=" + std::to_string(n_h));
}

SweepResult parameter_sweep(const AnalyzedCorpus& corpus, const std::vector<GoldSpan>& gold,
                            const std::vector<std::size_t>& nw_values, const std::vector<std::size_t>& nh_values,
                            const EvalOptions& options) {
  SweepResult out;
  out.nw_values = nw_values;
  out.nh_values = nh_values;
  std::size_t longest = 0;
  for (const AnalyzedDocument& d : corpus.docs) longest = std::max(longest, d.content_size());

  for (std::size_t nh : nh_values) {
    for (std::size_t nw : nw_values) {
      SweepCell c;
      c.n_w = nw;
      c.n_h = nh;
      DetectionParams p{nw, nh, options.s_min, options.splice_gap};
      p.validate();
      c.feasible = nw <= longest;
      c.metrics.beta = options.beta;
      out.cells.push_back(c);
    }
  }

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(out.cells.size(), 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < out.cells.size(); i = next++) {
      SweepCell& c = out.cells[i];
      if (!c.feasible) continue;
      try {
        DetectionParams p{c.n_w, c.n_h, options.s_min, options.splice_gap};
        IndexOptions io;
        io.threads = 1;
        Index index = Index::build(corpus, p, io);
        c.metrics = compute_metrics(evaluate_counts(corpus, index, gold, p, options.overlap), options.beta);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    const auto& f = out.cells[i].metrics.f;
    if (f && (!out.best || *f > *out.cells[*out.best].metrics.f)) out.best = i;
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "n_w,n_h,TP,FP,FN,P,R,F\n";
  for (const SweepCell& c : sweep.cells) {
    os << c.n_w << ',' << c.n_h << ',';
    if (c.feasible) {
      os << c.metrics.counts.tp << ',' << c.metrics.counts.fp << ',' << c.metrics.counts.fn << ',';
    } else {
      os << "nd,nd,nd,";
    }
    os << cell(c.metrics.precision) << ',' << cell(c.metrics.recall) << ',' << cell(c.metrics.f) << '\n';
  }
  return os.str();
}

std::string sweep_table(const SweepResult& sweep) {
  std::ostringstream os;
  auto table = [&](const char* title, std::optional<double> Metrics::*field) {
    os << title;
    for (std::size_t nw : sweep.nw_values) os << "\tn_w=" << nw;
    os << '\n';
    for (std::size_t nh : sweep.nh_values) {
      os << "n_h=" << nh;
      for (std::size_t nw : sweep.nw_values) os << '\t' << cell(sweep.at(nw, nh).metrics.*field);
      os << '\n';
    }
  };
  table("Recall", &Metrics::recall);
  os << '\n';
  table("Precis.", &Metrics::precision);
  os << '\n';
  table("F-score", &Metrics::f);
  if (sweep.best) {
    const SweepCell& b = sweep.cells[*sweep.best];
    os << "\nbest: n_w=" << b.n_w << " n_h=" << b.n_h << " F=" << cell(b.metrics.f) << '\n';
  } else {
    os << "\nbest: nd\n";
  }
  return os.str();
}

}  // namespace palimpsest
