#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "palimpsest/corpus.hpp"
#include "palimpsest/gapped_index.hpp"
#include "palimpsest/reuse_detect.hpp"
#include "palimpsest/span.hpp"
#include "palimpsest/text_pipeline.hpp"

namespace palimpsest {

struct GoldSpan {
  std::string doc_a;
  std::string doc_b;
  Span a_span;
  Span b_span;
  std::string label;
  bool questionable = false;

  friend bool operator==(const GoldSpan&, const GoldSpan&) = default;
};

// One JSON object per line: {doc_a, doc_b, a_start, a_end, b_start, b_end,
// label, questionable}. Blank lines are skipped.
std::vector<GoldSpan> parse_gold(std::string_view jsonl);
std::vector<GoldSpan> load_gold(const std::filesystem::path& path);

// Maps document references (id, id prefix or title) to doc_ids, checks the
// spans against the texts and puts each record in doc_id order (doc_a <
// doc_b), swapping the spans when needed.
std::vector<GoldSpan> resolve_gold(std::vector<GoldSpan> gold, const Corpus& corpus);

struct OverlapRule {
  double theta = 0.1;  // minimum overlap / gold length, on each axis
};

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

// Blocks and gold spans of one document pair, in the same orientation.
// Questionable spans never count as TP or FN, but a block touching one is
// not spurious.
MatchCounts match_gold(const std::vector<ReuseBlock>& blocks, const std::vector<GoldSpan>& gold,
                       const OverlapRule& rule = {});

// (1 + b^2) P R / (b^2 P + R); 0 when P = R = 0.
double f_beta(double precision, double recall, double beta = 0.5);

struct Metrics {
  MatchCounts counts;
  double beta = 0.5;
  std::optional<double> precision;  // undefined ("nd") without detections
  std::optional<double> recall;     // undefined without gold spans
  std::optional<double> f;
};

Metrics compute_metrics(const MatchCounts& counts, double beta = 0.5);

// Two decimals, or "nd".
std::string format_ratio(const std::optional<double>& v);

struct EvalOptions {
  std::size_t s_min = 4;
  std::optional<std::size_t> splice_gap;
  OverlapRule overlap;
  double beta = 0.5;
  unsigned threads = 0;
};

// Detection over every document pair of the corpus; counts are summed.
MatchCounts evaluate_counts(const AnalyzedCorpus& corpus, const Index& index, const std::vector<GoldSpan>& gold,
                            const DetectionParams& params, const OverlapRule& rule = {});
Metrics evaluate(const AnalyzedCorpus& corpus, const std::vector<GoldSpan>& gold, const DetectionParams& params,
                 const EvalOptions& options = {});

struct SweepCell {
  std::size_t n_w = 0;
  std::size_t n_h = 0;
  bool feasible = true;  // false when n_w exceeds every content stream
  Metrics metrics;
};

struct SweepResult {
  std::vector<std::size_t> nw_values;
  std::vector<std::size_t> nh_values;
  std::vector<SweepCell> cells;  // n_h major, n_w minor
  std::optional<std::size_t> best;  // highest F, first cell on ties

  const SweepCell& at(std::size_t n_w, std::size_t n_h) const;
};

SweepResult parameter_sweep(const AnalyzedCorpus& corpus, const std::vector<GoldSpan>& gold,
                            const std::vector<std::size_t>& nw_values, const std::vector<std::size_t>& nh_values,
                            const EvalOptions& options = {});

// Columns n_w, n_h, TP, FP, FN, P, R, F.
std::string sweep_csv(const SweepResult& sweep);
// Recall, precision and F-score sub-tables, one row per n_h.
std::string sweep_table(const SweepResult& sweep);

}  // namespace palimpsest
