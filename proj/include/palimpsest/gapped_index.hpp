#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "palimpsest/text_pipeline.hpp"

namespace palimpsest {

struct DetectionParams {
  std::size_t n_w = 3;
  std::size_t n_h = 2;
  std::size_t s_min = 4;
  std::optional<std::size_t> splice_gap;  // unset: n_w + n_h

  std::size_t effective_splice_gap() const noexcept { return splice_gap.value_or(n_w + n_h); }
  // Positions reachable from an anchor: n_w - 1 + n_h.
  std::size_t reach() const noexcept { return n_w - 1 + n_h; }
  // Throws UsageError, e.g. "window size must be ≥ 1".
  void validate() const;

  friend bool operator==(const DetectionParams&, const DetectionParams&) = default;
};

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// C(n_w - 1 + n_h, n_w - 1): windows emitted by an anchor with full reach.
std::uint64_t windows_per_anchor(std::size_t n_w, std::size_t n_h);

// Closed form for a document of `content_len` content tokens.
std::uint64_t window_count(std::size_t content_len, std::size_t n_w, std::size_t n_h);

struct GappedWindow {
  std::size_t anchor = 0;
  std::vector<std::uint32_t> members;  // strictly increasing, members[0] == anchor
  std::vector<std::string> stems;

  friend bool operator==(const GappedWindow&, const GappedWindow&) = default;
};

// For each anchor i, every choice of n_w - 1 positions among the next
// n_w - 1 + n_h content positions (clipped at the end), in lexicographic order.
std::vector<GappedWindow> enumerate_windows(std::span<const std::string> stems, std::size_t n_w,
                                            std::size_t n_h);

// Calls fn(anchor, members) for every window without materializing them.
void for_each_window(std::size_t content_len, std::size_t n_w, std::size_t n_h,
                     const std::function<void(std::uint32_t, std::span<const std::uint32_t>)>& fn);

using FingerprintHasher = std::function<std::uint64_t(std::span<const std::string_view>)>;

// Stable 64-bit hash of the stems joined with U+001F.
std::uint64_t fingerprint_hash(std::span<const std::string_view> stems);

struct Fingerprint {
  std::uint64_t hash = 0;
  std::vector<std::string> stems;
};

Fingerprint fingerprint(const GappedWindow& window, const FingerprintHasher& hasher = {});

struct Posting {
  std::uint32_t doc = 0;  // index into Index::doc_ids()
  std::uint32_t anchor = 0;
  std::vector<std::uint32_t> members;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct IndexOptions {
  // Drop fingerprints that occur in a single document.
  bool prune_singletons = false;
  unsigned threads = 0;
  FingerprintHasher hasher;  // empty: fingerprint_hash
};

// Sorted inverted index over gapped-window fingerprints. Postings carry the
// member set relative to the anchor as a bit mask; stems are kept per
// document so every lookup and join can verify them.
class Index {
 public:
  struct Entry {
    std::uint64_t hash;
    std::uint32_t doc;
    std::uint32_t anchor;
    std::uint64_t mask;  // bit k set: anchor + k is a member

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Index() = default;

  static Index build(const AnalyzedCorpus& corpus, const DetectionParams& params,
                     const IndexOptions& options = {});

  const DetectionParams& params() const noexcept { return params_; }
  const std::string& corpus_digest() const noexcept { return corpus_digest_; }
  const std::string& pipeline_digest() const noexcept { return pipeline_digest_; }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  std::optional<std::uint32_t> doc_index(std::string_view doc_id) const;
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool pruned() const noexcept { return pruned_; }

  // Stem id sequence of one document's content stream.
  std::span<const std::uint32_t> doc_stems(std::uint32_t doc) const { return doc_stems_[doc]; }
  const std::string& stem_text(std::uint32_t stem_id) const { return vocab_[stem_id]; }

  std::vector<std::uint32_t> members(const Entry& e) const;
  // True when the two postings cover the same stem sequence.
  bool same_stems(const Entry& x, const Entry& y) const;

  // Postings sorted by (doc, anchor, members); hash collisions are discarded
  // by comparing stems.
  std::vector<Posting> lookup(const Fingerprint& fp) const;
  std::vector<Posting> lookup(std::span<const std::string> stems) const;

  // Entries sharing `hash`, in (doc, anchor, mask) order.
  std::span<const Entry> group(std::uint64_t hash) const;

  void save(const std::filesystem::path& path) const;
  static Index load(const std::filesystem::path& path);
  std::string serialize() const;
  static Index deserialize(std::string_view bytes);

  // Union of two partial indexes over disjoint documents; parameters, hash
  // function and pipeline digests must agree.
  static Index merge(const Index& a, const Index& b);

  void set_hasher(FingerprintHasher hasher) { hasher_ = std::move(hasher); }

  friend bool operator==(const Index& x, const Index& y);

 private:
  std::uint64_t hash_of(std::span<const std::string_view> stems) const;
  void prune();
  void index_vocab();

  DetectionParams params_;
  std::string corpus_digest_;
  std::string pipeline_digest_;
  std::vector<std::string> doc_ids_;
  std::vector<std::string> doc_digests_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> vocab_ids_;
  std::vector<std::vector<std::uint32_t>> doc_stems_;
  std::vector<Entry> entries_;  // sorted by (hash, doc, anchor, mask)
  bool pruned_ = false;
  bool custom_hash_ = false;
  FingerprintHasher hasher_;
};

inline constexpr std::uint32_t kIndexFormatVersion = 1;

}  // namespace palimpsest
