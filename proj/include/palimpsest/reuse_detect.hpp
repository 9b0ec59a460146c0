#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "palimpsest/gapped_index.hpp"
#include "palimpsest/span.hpp"
#include "palimpsest/text_pipeline.hpp"

namespace palimpsest {

struct ElementaryMatch {
  std::string doc_a;
  std::string doc_b;
  std::vector<std::uint32_t> a_members;
  std::vector<std::uint32_t> b_members;
  Span a_span;
  Span b_span;

  std::uint32_t a_anchor() const { return a_members.front(); }
  std::uint32_t b_anchor() const { return b_members.front(); }

  friend bool operator==(const ElementaryMatch&, const ElementaryMatch&) = default;
};

struct ReuseBlock {
  std::size_t block_id = 0;
  std::string doc_a;
  std::string doc_b;
  std::vector<ElementaryMatch> matches;
  Span a_span;
  Span b_span;
  std::size_t strong_count = 0;  // distinct strong stems
  std::size_t score = 0;         // distinct content stems

  friend bool operator==(const ReuseBlock&, const ReuseBlock&) = default;
};

struct SimilarityZone {
  std::size_t zone_id = 0;
  std::string doc_a;
  std::string doc_b;
  Span a_span;
  Span b_span;
  std::vector<std::size_t> block_ids;
  double density = 0.0;  // blocks per character of mean side length

  friend bool operator==(const SimilarityZone&, const SimilarityZone&) = default;
};

struct ContextPair {
  std::size_t block_id = 0;
  Span a_range;  // excerpt position in document A
  Span b_range;
  std::string a_excerpt;
  std::string b_excerpt;
  std::vector<Span> a_highlights;  // relative to the excerpt, one per member token
  std::vector<Span> b_highlights;

  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

inline constexpr std::size_t kDefaultZoneRadius = 200;

// Shared verified fingerprints between two documents of the index, one match
// per posting pair, sorted by (a_members, b_members). The two ids must be
// distinct; the result is in the requested orientation.
std::vector<ElementaryMatch> find_matches(const Index& index, const AnalyzedCorpus& corpus,
                                          std::string_view doc_a, std::string_view doc_b);

// Greedy order-preserving chaining. Matches are visited by (a_anchor,
// b_anchor); each joins the block whose last match precedes it by at most
// `gap` content positions on both axes (closest first, then oldest block).
std::vector<ReuseBlock> splice(std::vector<ElementaryMatch> matches, std::size_t gap);

// Fills strong_count and score from the documents' content stems.
void score_blocks(std::vector<ReuseBlock>& blocks, const AnalyzedDocument& a, const AnalyzedDocument& b,
                  const StrengthMap& strength);

std::vector<ReuseBlock> filter_blocks(std::vector<ReuseBlock> blocks, std::size_t s_min);

// Merges blocks whose rectangles come within `radius` characters on both
// axes, repeated until no two zones do.
std::vector<SimilarityZone> aggregate_zones(const std::vector<ReuseBlock>& blocks,
                                            std::size_t radius = kDefaultZoneRadius);

ContextPair extract_context(const ReuseBlock& block, const AnalyzedDocument& a, const AnalyzedDocument& b,
                            std::size_t radius);

struct PairReport {
  std::string doc_a;
  std::string doc_b;
  std::size_t a_length = 0;  // characters
  std::size_t b_length = 0;
  DetectionParams params;
  std::string corpus_digest;
  std::size_t match_count = 0;
  std::size_t spliced_count = 0;      // blocks before filtering
  std::vector<ReuseBlock> blocks;     // kept blocks, ids 0..n-1
  std::vector<SimilarityZone> zones;
};

// find_matches, splice, score, filter, zones. Splicing runs with the lower
// doc_id on the first axis and the result is mirrored when the request is
// reversed, so (A, B) and (B, A) are exact mirror images.
PairReport detect_pair(const Index& index, const AnalyzedCorpus& corpus, std::string_view doc_a,
                       std::string_view doc_b, const DetectionParams& params);

// doc_a against every other document of the index, in doc_id order.
std::vector<PairReport> detect_all(const Index& index, const AnalyzedCorpus& corpus, std::string_view doc_a,
                                   const DetectionParams& params);

// Swaps the axes of a match, block, zone or whole report.
ElementaryMatch mirror(const ElementaryMatch& m);
PairReport mirror(const PairReport& r);

}  // namespace palimpsest
