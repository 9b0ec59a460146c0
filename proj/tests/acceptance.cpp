// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit when any
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "palimpsest/config.hpp"
#include "palimpsest/eval_harness.hpp"
#include "palimpsest/gapped_index.hpp"
#include "palimpsest/reuse_detect.hpp"
#include "palimpsest/stemmer.hpp"
#include "palimpsest/unicode.hpp"
#include "reported_sweep.hpp"
#include "support.hpp"

using namespace palimpsest;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kEnumerationBudget = 1.0;
constexpr double kFormulaBudget = 1.0;
constexpr double kFixtureBudget = 5.0;
constexpr double kOracleBudget = 60.0;
constexpr double kMonotonicityBudget = 60.0;
constexpr double kThroughputBudget = 60.0;
constexpr std::size_t kThroughputChars = 2500000;
constexpr std::size_t kOraclePairs = 200;
constexpr std::size_t kMonotonicitySeeds = 100;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

// C(n, k) by Pascal's rule.
std::uint64_t pascal(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::uint64_t>> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i].assign(i + 1, 1);
    for (std::size_t j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
  }
  return k <= n ? t[n][k] : 0;
}

Outcome window_enumeration() {
  const std::vector<std::string> m{"M1", "M2", "M3", "M4", "M5"};
  std::set<std::string> got;
  for (const GappedWindow& w : enumerate_windows(m, 3, 2)) {
    if (w.anchor != 0) continue;
    std::string key;
    for (const std::string& s : w.stems) key += s.substr(1);
    got.insert(key);
  }
  const std::set<std::string> want{"123", "124", "134", "135", "145", "125"};
  if (got != want) return fail("member sets of the first anchor differ");

  for (std::size_t nw = 1; nw <= 6; ++nw) {
    for (std::size_t nh = 0; nh <= 5; ++nh) {
      std::vector<std::string> stems;
      for (std::size_t i = 0; i < nw + nh + 4; ++i) stems.push_back("w" + std::to_string(i));
      std::map<std::size_t, std::uint64_t> per_anchor;
      for (const GappedWindow& w : enumerate_windows(stems, nw, nh)) ++per_anchor[w.anchor];
      const std::uint64_t expect = pascal(nw - 1 + nh, nw - 1);
      std::map<std::size_t, std::uint64_t> brute;
      for (const auto& w : testsupport::brute_windows(stems.size(), nw, nh)) ++brute[w.front()];
      for (std::size_t a = 0; a < 4; ++a) {
        if (per_anchor[a] != expect || brute[a] != expect) {
          return fail("n_w=" + std::to_string(nw) + " n_h=" + std::to_string(nh) + " anchor " + std::to_string(a) +
                      ": " + std::to_string(per_anchor[a]) + " windows, expected " + std::to_string(expect));
        }
      }
    }
  }
  return {true, "6 member sets; 36 grid cells match C(n_w-1+n_h, n_w-1)"};
}

Outcome formula_consistency() {
  std::size_t defined = 0;
  double worst = 0.0;
  for (int h = 0; h < 6; ++h) {
    for (int w = 0; w < 6; ++w) {
      if (testsupport::kReportedF[h][w] < 0) continue;
      ++defined;
      const double f = f_beta(testsupport::kReportedPrecision[h][w], testsupport::kReportedRecall[h][w], 0.5);
      const double d = std::abs(f - testsupport::kReportedF[h][w]);
      worst = std::max(worst, d);
      if (d > testsupport::kFTolerance) {
        return fail("n_h=" + std::to_string(h) + " n_w=" + std::to_string(w + 1) + ": F=" + std::to_string(f));
      }
    }
  }
  if (defined != 34) return fail(std::to_string(defined) + " defined cells, expected 34");
  char buf[96];
  std::snprintf(buf, sizeof buf, "34 cells within %.2f (worst %.4f)", testsupport::kFTolerance, worst);
  return {true, buf};
}

Outcome fixture_detection() {
  Config cfg = load_config(testsupport::fixtures_dir() / "palimpsest.toml");
  Corpus corpus = testsupport::fixture_corpus();
  AnalyzedCorpus analyzed = analyze(corpus, pipeline_config(cfg));
  auto gold = resolve_gold(load_gold(testsupport::fixtures_dir() / "gold.jsonl"), corpus);
  const DetectionParams p{3, 2, 4};
  if (!(cfg.params == p)) return fail("shipped config does not use the default parameters");
  Index index = Index::build(analyzed, p);
  MatchCounts c = evaluate_counts(analyzed, index, gold, p, {cfg.overlap_theta});
  Metrics m = compute_metrics(c, cfg.beta);
  std::ostringstream os;
  os << "TP=" << c.tp << " FP=" << c.fp << " FN=" << c.fn << " P=" << format_ratio(m.precision)
     << " R=" << format_ratio(m.recall);
  if (c.fn != 0 || c.fp != 0 || c.tp != gold.size()) return fail(os.str());
  return {true, os.str()};
}

Outcome oracle_equivalence() {
  const PipelineConfig cfg = testsupport::random_pipeline();
  std::size_t blocks = 0, max_tokens = 0;
  for (std::size_t seed = 1; seed <= kOraclePairs; ++seed) {
    auto pair = testsupport::planted_pair(seed, 500);
    AnalyzedCorpus c = testsupport::analyze_pair(pair.text_a, pair.text_b, cfg);
    max_tokens = std::max({max_tokens, c.docs[0].content_size(), c.docs[1].content_size()});
    const auto ref_matches = testsupport::naive_matches(c.docs[0], c.docs[1], 3, 2);
    Index index = Index::build(c, {3, 2}, {false, 1, {}});
    for (std::size_t s_min : {0u, 4u}) {
      const DetectionParams p{3, 2, s_min};
      PairReport r = detect_pair(index, c, "doc-a", "doc-b", p);
      auto want = testsupport::naive_blocks(c.docs[0], c.docs[1], c.strength, p, &ref_matches);
      if (testsupport::to_ref(r.blocks) != want) {
        return fail("seed " + std::to_string(seed) + " s_min=" + std::to_string(s_min) + ": " +
                    std::to_string(r.blocks.size()) + " blocks, reference " + std::to_string(want.size()));
      }
      if (r.match_count != ref_matches.size()) return fail("seed " + std::to_string(seed) + ": match count differs");
      if (s_min == 4) blocks += want.size();
    }
  }
  if (max_tokens > 500) return fail("generated document exceeds 500 content tokens");
  return {true, std::to_string(kOraclePairs) + " pairs, " + std::to_string(blocks) + " blocks at s_min=4 identical"};
}

using MatchKey = std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>;

std::set<MatchKey> match_set(const AnalyzedCorpus& c, std::size_t nw, std::size_t nh) {
  Index index = Index::build(c, {nw, nh}, {false, 1, {}});
  std::set<MatchKey> out;
  for (const ElementaryMatch& m : find_matches(index, c, "doc-a", "doc-b")) out.insert({m.a_members, m.b_members});
  return out;
}

Outcome monotonicity() {
  const PipelineConfig cfg = testsupport::random_pipeline();
  std::size_t recall_rows = 0;
  for (std::size_t seed = 1; seed <= kMonotonicitySeeds; ++seed) {
    const std::string tag = "seed " + std::to_string(seed) + ": ";
    auto pair = testsupport::planted_pair(1000 + seed, 400);
    AnalyzedCorpus c = testsupport::analyze_pair(pair.text_a, pair.text_b, cfg);

    for (std::size_t nw : {2u, 3u}) {
      std::set<MatchKey> prev = match_set(c, nw, 0);
      for (std::size_t nh = 1; nh <= 3; ++nh) {
        std::set<MatchKey> cur = match_set(c, nw, nh);
        if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end())) {
          return fail(tag + "match set at n_w=" + std::to_string(nw) + " n_h=" + std::to_string(nh) + " lost matches");
        }
        prev = std::move(cur);
      }
    }

    Index index = Index::build(c, {3, 2}, {false, 1, {}});
    std::vector<testsupport::RefBlock> prev = testsupport::to_ref(detect_pair(index, c, "doc-a", "doc-b", {3, 2, 0}).blocks);
    for (std::size_t s = 1; s <= 10; ++s) {
      auto cur = testsupport::to_ref(detect_pair(index, c, "doc-a", "doc-b", {3, 2, s}).blocks);
      if (!std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) {
        return fail(tag + "block set at s_min=" + std::to_string(s) + " is not a subset");
      }
      prev = std::move(cur);
    }
  }

  // Recall over the 6x6 grid on the shipped gold corpus, once through the
  // sweep and once through the reference detector.
  Config fcfg = load_config(testsupport::fixtures_dir() / "palimpsest.toml");
  Corpus corpus = testsupport::fixture_corpus();
  AnalyzedCorpus fixture = analyze(corpus, pipeline_config(fcfg));
  auto gold = resolve_gold(load_gold(testsupport::fixtures_dir() / "gold.jsonl"), corpus);
  const std::vector<std::size_t> grid{1, 2, 3, 4, 5, 6};
  EvalOptions eo;
  eo.overlap.theta = fcfg.overlap_theta;
  SweepResult sweep = parameter_sweep(fixture, gold, grid, {0, 1, 2, 3, 4, 5}, eo);
  for (std::size_t nh = 0; nh <= 5; ++nh) {
    double last = 2.0;
    for (std::size_t nw : grid) {
      const DetectionParams p{nw, nh, eo.s_min};
      MatchCounts ref;
      for (std::size_t i = 0; i < fixture.docs.size(); ++i) {
        for (std::size_t j = i + 1; j < fixture.docs.size(); ++j) {
          const AnalyzedDocument* lo = &fixture.docs[i];
          const AnalyzedDocument* hi = &fixture.docs[j];
          if (hi->doc_id < lo->doc_id) std::swap(lo, hi);
          std::vector<ReuseBlock> blocks;
          for (const auto& b : testsupport::naive_blocks(*lo, *hi, fixture.strength, p)) {
            ReuseBlock rb;
            rb.a_span = {b.a_start, b.a_end};
            rb.b_span = {b.b_start, b.b_end};
            blocks.push_back(rb);
          }
          std::vector<GoldSpan> pair_gold;
          for (const GoldSpan& g : gold) {
            if (g.doc_a == lo->doc_id && g.doc_b == hi->doc_id) pair_gold.push_back(g);
          }
          ref += match_gold(blocks, pair_gold, eo.overlap);
        }
      }
      const std::string cell = "n_w=" + std::to_string(nw) + " n_h=" + std::to_string(nh);
      if (!(ref == sweep.at(nw, nh).metrics.counts)) return fail("fixture grid " + cell + ": sweep and reference disagree");
      const double r = compute_metrics(ref).recall.value_or(0.0);
      if (r > last + 1e-12) {
        return fail("fixture grid " + cell + ": recall rises from " + format_ratio(last) + " to " + format_ratio(r));
      }
      last = r;
    }
    ++recall_rows;
  }
  return {true, std::to_string(kMonotonicitySeeds) + " seeds monotone in n_h and s_min; " + std::to_string(recall_rows) +
                    " fixture recall rows non-increasing in n_w"};
}

Outcome throughput() {
  testsupport::TextGen g(77);
  std::vector<std::string> raw;
  std::size_t chars = 0;
  while (chars < kThroughputChars) {
    raw.push_back(g.render(g.words(8000)));
    chars += unicode::code_point_count(raw.back());
  }
  PipelineConfig pc;
  const auto t0 = Clock::now();
  Corpus corpus("bulk");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    DocumentMeta meta;
    meta.title = "doc" + std::to_string(i);
    corpus.add(make_document(raw[i], meta));
  }
  AnalyzedCorpus analyzed = analyze(corpus, pc, 1);
  Index index = Index::build(analyzed, {3, 2}, {false, 1, {}});
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu chars, %zu postings in %.2f s (%.0f chars/s)", chars, index.size(), secs,
                static_cast<double>(chars) / secs);
  if (secs > kThroughputBudget) return fail(buf);
  return {true, buf};
}

std::size_t vector_mismatches(const char* file, Language lang, std::size_t& total) {
  std::ifstream in(testsupport::source_dir() / "tests" / "data" / file);
  if (!in) throw std::runtime_error(std::string("missing ") + file);
  std::string line;
  std::size_t bad = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    ++total;
    if (stem(line.substr(0, tab), lang) != line.substr(tab + 1)) ++bad;
  }
  return bad;
}

Outcome pipeline_conformance() {
  std::size_t fr = 0, en = 0;
  const std::size_t bad_fr = vector_mismatches("stem_fr.tsv", Language::French, fr);
  const std::size_t bad_en = vector_mismatches("stem_en.tsv", Language::English, en);
  if (bad_fr || bad_en) {
    return fail(std::to_string(bad_fr) + " French and " + std::to_string(bad_en) + " English stem mismatches");
  }
  const PipelineConfig cfg = testsupport::fixture_pipeline();
  const Stoplist& stops = cfg.effective_stoplist();
  std::size_t tokens = 0;
  for (const auto& path : testsupport::fixture_files()) {
    const std::string name = path.stem().string();
    const Document d = make_document(testsupport::read_text(path), {name, "", "", "utf-8"});
    const AnalyzedDocument a = analyze_document(d, cfg);
    const std::u32string& u = a.text;
    std::size_t cursor = 0, ci = 0;
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
      const Token& t = a.tokens[i];
      if (t.span.start < cursor || t.span.empty()) return fail(name + ": tokens overlap or are empty");
      for (std::size_t k = cursor; k < t.span.start; ++k) {
        if (unicode::is_letter(u[k])) return fail(name + ": letter outside every token at " + std::to_string(k));
      }
      if (unicode::slice(u, t.span.start, t.span.end) != t.surface) return fail(name + ": span does not rebuild surface");
      if (t.is_stop != (stops.count(fold(t.surface)) > 0)) return fail(name + ": stop flag wrong for " + t.surface);
      if (!t.is_stop) {
        if (ci >= a.content.size() || a.content[ci] != i) return fail(name + ": content stream skips a token");
        ++ci;
      }
      cursor = t.span.end;
      ++tokens;
    }
    for (std::size_t k = cursor; k < u.size(); ++k) {
      if (unicode::is_letter(u[k])) return fail(name + ": trailing letter outside every token");
    }
    if (ci != a.content.size()) return fail(name + ": content stream has extra entries");
  }
  return {true, std::to_string(fr) + " French and " + std::to_string(en) + " English vectors; " +
                    std::to_string(tokens) + " fixture tokens"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"window-enumeration", kEnumerationBudget, window_enumeration},
      {"f-formula-consistency", kFormulaBudget, formula_consistency},
      {"fixture-detection", kFixtureBudget, fixture_detection},
      {"oracle-equivalence", kOracleBudget, oracle_equivalence},
      {"monotonicity", kMonotonicityBudget, monotonicity},
      {"throughput", kThroughputBudget, throughput},
      {"pipeline-conformance", 0.0, pipeline_conformance},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (o.pass && c.budget > 0 && secs > c.budget) {
      o.pass = false;
      o.detail += "; over the time budget";
    }
    char timing[48];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << timing << "]" << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
