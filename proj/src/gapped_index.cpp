#include "palimpsest/gapped_index.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <thread>

#include "palimpsest/corpus.hpp"
#include "palimpsest/digest.hpp"
#include "palimpsest/error.hpp"
#include "fsutil.hpp"

namespace palimpsest {

namespace {

constexpr char kMagic[8] = {'P', 'L', 'M', 'P', 'I', 'D', 'X', '\0'};
constexpr char kSeparator = '\x1f';

constexpr std::uint8_t kFlagPruned = 1;
constexpr std::uint8_t kFlagCustomHash = 2;

// Combinations of `k` offsets out of 1..avail in lexicographic order.
template <typename Fn>
void combinations(std::uint32_t anchor, std::size_t avail, std::size_t k,
                  std::vector<std::uint32_t>& members, Fn&& fn) {
  members.resize(k + 1);
  members[0] = anchor;
  if (k == 0) {
    fn(std::span<const std::uint32_t>(members));
    return;
  }
  if (avail < k) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = j + 1;
  while (true) {
    for (std::size_t j = 0; j < k; ++j) members[j + 1] = anchor + static_cast<std::uint32_t>(idx[j]);
    fn(std::span<const std::uint32_t>(members));
    std::size_t j = k;
    while (j > 0 && idx[j - 1] == avail - (k - j)) --j;
    if (j == 0) return;
    ++idx[j - 1];
    for (std::size_t t = j; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

template <typename Fn>
void windows(std::size_t len, std::size_t n_w, std::size_t n_h, Fn&& fn) {
  if (n_w == 0 || len < n_w) return;
  const std::size_t reach = n_w - 1 + n_h;
  std::vector<std::uint32_t> members;
  for (std::size_t i = 0; i + n_w <= len; ++i) {
    const std::size_t avail = std::min(reach, len - 1 - i);
    combinations(static_cast<std::uint32_t>(i), avail, n_w - 1, members, fn);
  }
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    std::string_view b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::string_view b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    return std::string(take(n));
  }
  std::string_view take(std::size_t n) {
    if (in_.size() - pos_ < n) throw DataError("corrupt index: truncated file");
    std::string_view out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  // Guards element counts against the remaining payload before reserving.
  std::size_t count(std::uint64_t n, std::size_t min_bytes) {
    if (min_bytes > 0 && n > (in_.size() - pos_) / min_bytes) throw DataError("corrupt index: bad count");
    return static_cast<std::size_t>(n);
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

bool entry_less(const Index::Entry& x, const Index::Entry& y) {
  if (x.hash != y.hash) return x.hash < y.hash;
  if (x.doc != y.doc) return x.doc < y.doc;
  if (x.anchor != y.anchor) return x.anchor < y.anchor;
  return x.mask < y.mask;
}

std::uint64_t to_mask(std::span<const std::uint32_t> members) {
  std::uint64_t mask = 0;
  for (std::uint32_t m : members) mask |= std::uint64_t{1} << (m - members[0]);
  return mask;
}

}  // namespace

void DetectionParams::validate() const {
  if (n_w < 1) throw UsageError("window size must be ≥ 1");
  if (n_w + n_h > 64) throw UsageError("window size plus holes must be ≤ 64");
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t windows_per_anchor(std::size_t n_w, std::size_t n_h) {
  if (n_w == 0) return 0;
  return binomial(n_w - 1 + n_h, n_w - 1);
}

std::uint64_t window_count(std::size_t len, std::size_t n_w, std::size_t n_h) {
  if (n_w == 0 || len < n_w) return 0;
  const std::size_t reach = n_w - 1 + n_h;
  // Anchors with full reach, then the clipped tail: sum_{k<m} C(k, n_w-1) = C(m, n_w).
  if (len <= reach) return binomial(len, n_w);
  return (len - reach) * binomial(reach, n_w - 1) + binomial(reach, n_w);
}

void for_each_window(std::size_t content_len, std::size_t n_w, std::size_t n_h,
                     const std::function<void(std::uint32_t, std::span<const std::uint32_t>)>& fn) {
  windows(content_len, n_w, n_h, [&](std::span<const std::uint32_t> m) { fn(m[0], m); });
}

std::vector<GappedWindow> enumerate_windows(std::span<const std::string> stems, std::size_t n_w,
                                            std::size_t n_h) {
  std::vector<GappedWindow> out;
  windows(stems.size(), n_w, n_h, [&](std::span<const std::uint32_t> m) {
    GappedWindow w;
    w.anchor = m[0];
    w.members.assign(m.begin(), m.end());
    for (std::uint32_t i : m) w.stems.push_back(stems[i]);
    out.push_back(std::move(w));
  });
  return out;
}

std::uint64_t fingerprint_hash(std::span<const std::string_view> stems) {
  std::string key;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    if (i) key.push_back(kSeparator);
    key.append(stems[i]);
  }
  return stable_hash64(key);
}

Fingerprint fingerprint(const GappedWindow& window, const FingerprintHasher& hasher) {
  std::vector<std::string_view> views(window.stems.begin(), window.stems.end());
  Fingerprint fp;
  fp.hash = hasher ? hasher(views) : fingerprint_hash(views);
  fp.stems = window.stems;
  return fp;
}

std::uint64_t Index::hash_of(std::span<const std::string_view> stems) const {
  return hasher_ ? hasher_(stems) : fingerprint_hash(stems);
}

void Index::index_vocab() {
  vocab_ids_.clear();
  vocab_ids_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    vocab_ids_.emplace(vocab_[i], static_cast<std::uint32_t>(i));
  }
}

Index Index::build(const AnalyzedCorpus& corpus, const DetectionParams& params,
                   const IndexOptions& options) {
  params.validate();
  Index index;
  index.params_ = params;
  index.pipeline_digest_ = corpus.pipeline_digest;
  index.hasher_ = options.hasher;
  index.custom_hash_ = static_cast<bool>(options.hasher);

  std::vector<std::pair<std::string, std::string>> members;
  for (const AnalyzedDocument& d : corpus.docs) {
    index.doc_ids_.push_back(d.doc_id);
    index.doc_digests_.push_back(d.text_digest);
    members.emplace_back(d.doc_id, d.text_digest);
    std::vector<std::uint32_t> ids;
    ids.reserve(d.content.size());
    for (std::uint32_t t : d.content) {
      const std::string& s = d.tokens[t].stem;
      auto [it, fresh] = index.vocab_ids_.try_emplace(s, static_cast<std::uint32_t>(index.vocab_.size()));
      if (fresh) index.vocab_.push_back(s);
      ids.push_back(it->second);
    }
    index.doc_stems_.push_back(std::move(ids));
  }
  index.corpus_digest_ = manifest_digest(members);

  const std::size_t ndocs = corpus.docs.size();
  std::vector<std::vector<Entry>> per_doc(ndocs);
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(ndocs, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    std::string key;
    std::vector<std::string_view> views;
    for (std::size_t d = next++; d < ndocs; d = next++) {
      try {
        const std::vector<std::uint32_t>& ids = index.doc_stems_[d];
        std::vector<Entry>& out = per_doc[d];
        out.reserve(window_count(ids.size(), params.n_w, params.n_h));
        windows(ids.size(), params.n_w, params.n_h, [&](std::span<const std::uint32_t> m) {
          std::uint64_t h;
          if (index.hasher_) {
            views.clear();
            for (std::uint32_t i : m) views.push_back(index.vocab_[ids[i]]);
            h = index.hasher_(views);
          } else {
            key.clear();
            for (std::size_t j = 0; j < m.size(); ++j) {
              if (j) key.push_back(kSeparator);
              key.append(index.vocab_[ids[m[j]]]);
            }
            h = stable_hash64(key);
          }
          out.push_back({h, static_cast<std::uint32_t>(d), m[0], to_mask(m)});
        });
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

  std::size_t total = 0;
  for (const auto& v : per_doc) total += v.size();
  index.entries_.reserve(total);
  for (auto& v : per_doc) {
    index.entries_.insert(index.entries_.end(), v.begin(), v.end());
    std::vector<Entry>().swap(v);
  }
  std::sort(index.entries_.begin(), index.entries_.end(), entry_less);
  if (options.prune_singletons) index.prune();
  return index;
}

void Index::prune() {
  std::vector<Entry> kept;
  kept.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size();) {
    std::size_t j = i;
    bool multi = false;
    while (j < entries_.size() && entries_[j].hash == entries_[i].hash) {
      multi = multi || entries_[j].doc != entries_[i].doc;
      ++j;
    }
    if (multi) kept.insert(kept.end(), entries_.begin() + i, entries_.begin() + j);
    i = j;
  }
  entries_ = std::move(kept);
  pruned_ = true;
}

std::optional<std::uint32_t> Index::doc_index(std::string_view doc_id) const {
  auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
  if (it != doc_ids_.end() && *it == doc_id) return static_cast<std::uint32_t>(it - doc_ids_.begin());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    if (doc_ids_[i] == doc_id) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

std::vector<std::uint32_t> Index::members(const Entry& e) const {
  std::vector<std::uint32_t> out;
  out.reserve(std::popcount(e.mask));
  for (std::uint64_t m = e.mask; m; m &= m - 1) {
    out.push_back(e.anchor + static_cast<std::uint32_t>(std::countr_zero(m)));
  }
  return out;
}

bool Index::same_stems(const Entry& x, const Entry& y) const {
  if (std::popcount(x.mask) != std::popcount(y.mask)) return false;
  const auto& sx = doc_stems_[x.doc];
  const auto& sy = doc_stems_[y.doc];
  std::uint64_t mx = x.mask;
  std::uint64_t my = y.mask;
  while (mx) {
    std::uint32_t ix = x.anchor + static_cast<std::uint32_t>(std::countr_zero(mx));
    std::uint32_t iy = y.anchor + static_cast<std::uint32_t>(std::countr_zero(my));
    if (sx[ix] != sy[iy]) return false;
    mx &= mx - 1;
    my &= my - 1;
  }
  return true;
}

std::span<const Index::Entry> Index::group(std::uint64_t hash) const {
  auto lo = std::lower_bound(entries_.begin(), entries_.end(), hash,
                             [](const Entry& e, std::uint64_t h) { return e.hash < h; });
  auto hi = std::upper_bound(lo, entries_.end(), hash,
                             [](std::uint64_t h, const Entry& e) { return h < e.hash; });
  return {lo, hi};
}

std::vector<Posting> Index::lookup(const Fingerprint& fp) const {
  std::vector<Posting> out;
  std::vector<std::uint32_t> want;
  want.reserve(fp.stems.size());
  for (const std::string& s : fp.stems) {
    auto it = vocab_ids_.find(s);
    if (it == vocab_ids_.end()) return out;
    want.push_back(it->second);
  }
  for (const Entry& e : group(fp.hash)) {
    if (static_cast<std::size_t>(std::popcount(e.mask)) != want.size()) continue;
    std::vector<std::uint32_t> m = members(e);
    const auto& stems = doc_stems_[e.doc];
    bool ok = true;
    for (std::size_t j = 0; j < m.size() && ok; ++j) ok = stems[m[j]] == want[j];
    if (ok) out.push_back({e.doc, e.anchor, std::move(m)});
  }
  return out;
}

std::vector<Posting> Index::lookup(std::span<const std::string> stems) const {
  std::vector<std::string_view> views(stems.begin(), stems.end());
  Fingerprint fp{hash_of(views), std::vector<std::string>(stems.begin(), stems.end())};
  return lookup(fp);
}

std::string Index::serialize() const {
  Writer w;
  w.raw(std::string_view(kMagic, sizeof kMagic));
  w.u32(kIndexFormatVersion);
  w.u32(static_cast<std::uint32_t>(params_.n_w));
  w.u32(static_cast<std::uint32_t>(params_.n_h));
  w.u8((pruned_ ? kFlagPruned : 0) | (custom_hash_ ? kFlagCustomHash : 0));
  w.str(corpus_digest_);
  w.str(pipeline_digest_);
  w.u32(static_cast<std::uint32_t>(vocab_.size()));
  for (const std::string& s : vocab_) w.str(s);
  w.u32(static_cast<std::uint32_t>(doc_ids_.size()));
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    w.str(doc_ids_[d]);
    w.str(doc_digests_[d]);
    w.u32(static_cast<std::uint32_t>(doc_stems_[d].size()));
    for (std::uint32_t id : doc_stems_[d]) w.u32(id);
  }
  w.u64(entries_.size());
  for (const Entry& e : entries_) {
    w.u64(e.hash);
    w.u32(e.doc);
    w.u32(e.anchor);
    w.u64(e.mask);
  }
  return w.take();
}

Index Index::deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < sizeof kMagic || r.take(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) {
    throw DataError("not an index file");
  }
  const std::uint32_t version = r.u32();
  if (version != kIndexFormatVersion) {
    throw DataError("unsupported index format version " + std::to_string(version));
  }
  Index index;
  index.params_.n_w = r.u32();
  index.params_.n_h = r.u32();
  if (index.params_.n_w < 1 || index.params_.n_w + index.params_.n_h > 64) {
    throw DataError("corrupt index: bad parameters");
  }
  const std::uint8_t flags = r.u8();
  index.pruned_ = flags & kFlagPruned;
  index.custom_hash_ = flags & kFlagCustomHash;
  index.corpus_digest_ = r.str();
  index.pipeline_digest_ = r.str();

  const std::size_t nvocab = r.count(r.u32(), 4);
  index.vocab_.reserve(nvocab);
  for (std::size_t i = 0; i < nvocab; ++i) index.vocab_.push_back(r.str());

  const std::size_t ndocs = r.count(r.u32(), 12);
  for (std::size_t d = 0; d < ndocs; ++d) {
    index.doc_ids_.push_back(r.str());
    index.doc_digests_.push_back(r.str());
    const std::size_t len = r.count(r.u32(), 4);
    std::vector<std::uint32_t> ids(len);
    for (std::uint32_t& id : ids) {
      id = r.u32();
      if (id >= nvocab) throw DataError("corrupt index: stem id out of range");
    }
    index.doc_stems_.push_back(std::move(ids));
  }

  const std::size_t nentries = r.count(r.u64(), 24);
  index.entries_.resize(nentries);
  for (Entry& e : index.entries_) {
    e.hash = r.u64();
    e.doc = r.u32();
    e.anchor = r.u32();
    e.mask = r.u64();
    if (e.doc >= ndocs || !(e.mask & 1)) throw DataError("corrupt index: bad posting");
    const std::size_t last = e.anchor + (63 - std::countl_zero(e.mask));
    if (last >= index.doc_stems_[e.doc].size()) throw DataError("corrupt index: posting out of range");
  }
  if (!r.done()) throw DataError("corrupt index: trailing bytes");
  if (!std::is_sorted(index.entries_.begin(), index.entries_.end(), entry_less)) {
    throw DataError("corrupt index: postings not sorted");
  }
  index.index_vocab();
  return index;
}

void Index::save(const std::filesystem::path& path) const {
  fsutil::write_file_atomic(path, serialize());
}

Index Index::load(const std::filesystem::path& path) {
  return deserialize(fsutil::read_file(path));
}

Index Index::merge(const Index& a, const Index& b) {
  if (a.params_.n_w != b.params_.n_w || a.params_.n_h != b.params_.n_h) {
    throw DataError("index parameter mismatch: (n_w=" + std::to_string(a.params_.n_w) +
                    ", n_h=" + std::to_string(a.params_.n_h) + ") vs (n_w=" +
                    std::to_string(b.params_.n_w) + ", n_h=" + std::to_string(b.params_.n_h) + ")");
  }
  if (a.pipeline_digest_ != b.pipeline_digest_) throw DataError("index parameter mismatch: pipeline differs");
  if (a.custom_hash_ != b.custom_hash_) throw DataError("index parameter mismatch: hash function differs");
  if (a.pruned_ || b.pruned_) throw DataError("cannot merge pruned indexes");

  struct Source {
    const Index* index;
    std::uint32_t doc;
  };
  std::vector<Source> order;
  for (std::uint32_t d = 0; d < a.doc_ids_.size(); ++d) order.push_back({&a, d});
  for (std::uint32_t d = 0; d < b.doc_ids_.size(); ++d) order.push_back({&b, d});
  std::sort(order.begin(), order.end(), [](const Source& x, const Source& y) {
    return x.index->doc_ids_[x.doc] < y.index->doc_ids_[y.doc];
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i].index->doc_ids_[order[i].doc] == order[i - 1].index->doc_ids_[order[i - 1].doc]) {
      throw DataError("cannot merge indexes sharing document " + order[i].index->doc_ids_[order[i].doc]);
    }
  }

  Index out;
  out.params_ = a.params_;
  out.pipeline_digest_ = a.pipeline_digest_;
  out.custom_hash_ = a.custom_hash_;
  out.hasher_ = a.hasher_;

  std::vector<std::uint32_t> remap_a(a.doc_ids_.size());
  std::vector<std::uint32_t> remap_b(b.doc_ids_.size());
  std::vector<std::pair<std::string, std::string>> members;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Index& src = *order[i].index;
    const std::uint32_t d = order[i].doc;
    (&src == &a ? remap_a : remap_b)[d] = static_cast<std::uint32_t>(i);
    out.doc_ids_.push_back(src.doc_ids_[d]);
    out.doc_digests_.push_back(src.doc_digests_[d]);
    members.emplace_back(src.doc_ids_[d], src.doc_digests_[d]);
    std::vector<std::uint32_t> ids;
    ids.reserve(src.doc_stems_[d].size());
    for (std::uint32_t old : src.doc_stems_[d]) {
      const std::string& s = src.vocab_[old];
      auto [it, fresh] = out.vocab_ids_.try_emplace(s, static_cast<std::uint32_t>(out.vocab_.size()));
      if (fresh) out.vocab_.push_back(s);
      ids.push_back(it->second);
    }
    out.doc_stems_.push_back(std::move(ids));
  }
  out.corpus_digest_ = manifest_digest(members);

  out.entries_.reserve(a.entries_.size() + b.entries_.size());
  for (Entry e : a.entries_) {
    e.doc = remap_a[e.doc];
    out.entries_.push_back(e);
  }
  for (Entry e : b.entries_) {
    e.doc = remap_b[e.doc];
    out.entries_.push_back(e);
  }
  std::sort(out.entries_.begin(), out.entries_.end(), entry_less);
  return out;
}

bool operator==(const Index& x, const Index& y) {
  return x.params_.n_w == y.params_.n_w && x.params_.n_h == y.params_.n_h &&
         x.corpus_digest_ == y.corpus_digest_ && x.pipeline_digest_ == y.pipeline_digest_ &&
         x.doc_ids_ == y.doc_ids_ && x.doc_digests_ == y.doc_digests_ && x.vocab_ == y.vocab_ &&
         x.doc_stems_ == y.doc_stems_ && x.entries_ == y.entries_ && x.pruned_ == y.pruned_ &&
         x.custom_hash_ == y.custom_hash_;
}

}  // namespace palimpsest
