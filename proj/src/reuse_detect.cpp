#include "palimpsest/reuse_detect.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "palimpsest/error.hpp"
#include "palimpsest/unicode.hpp"

namespace palimpsest {

namespace {

const AnalyzedDocument& require_doc(const AnalyzedCorpus& corpus, std::string_view id) {
  const AnalyzedDocument* d = corpus.find(id);
  if (!d) throw DataError("unknown document: " + std::string(id));
  return *d;
}

std::uint32_t require_index(const Index& index, std::string_view id) {
  auto d = index.doc_index(id);
  if (!d) throw DataError("document not in index: " + std::string(id));
  return *d;
}

void check_params(const Index& index, const DetectionParams& params) {
  params.validate();
  if (index.params().n_w != params.n_w || index.params().n_h != params.n_h) {
    throw DataError("index built with n_w=" + std::to_string(index.params().n_w) + ", n_h=" +
                    std::to_string(index.params().n_h) + " but detection asks for n_w=" +
                    std::to_string(params.n_w) + ", n_h=" + std::to_string(params.n_h));
  }
}

Span member_span(const AnalyzedDocument& doc, const std::vector<std::uint32_t>& members) {
  return {doc.content_token(members.front()).span.start, doc.content_token(members.back()).span.end};
}

bool match_less(const ElementaryMatch& x, const ElementaryMatch& y) {
  return std::tie(x.a_members, x.b_members) < std::tie(y.a_members, y.b_members);
}

void sort_blocks(std::vector<ReuseBlock>& blocks) {
  for (ReuseBlock& b : blocks) std::sort(b.matches.begin(), b.matches.end(), match_less);
  std::stable_sort(blocks.begin(), blocks.end(), [](const ReuseBlock& x, const ReuseBlock& y) {
    return std::tie(x.a_span, x.b_span, x.matches.front().a_members, x.matches.front().b_members) <
           std::tie(y.a_span, y.b_span, y.matches.front().a_members, y.matches.front().b_members);
  });
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].block_id = i;
}

// Matches of doc `da` against every doc in `targets`, keyed by target.
std::map<std::uint32_t, std::vector<ElementaryMatch>> collect(const Index& index, const AnalyzedCorpus& corpus,
                                                              std::uint32_t da,
                                                              const std::set<std::uint32_t>& targets) {
  std::map<std::uint32_t, std::vector<ElementaryMatch>> out;
  const auto& ids = index.doc_ids();
  const AnalyzedDocument& a = require_doc(corpus, ids[da]);
  std::map<std::uint32_t, const AnalyzedDocument*> docs;
  for (std::uint32_t t : targets) docs[t] = &require_doc(corpus, ids[t]);

  std::span<const Index::Entry> entries = index.entries();
  std::vector<const Index::Entry*> left;
  std::vector<const Index::Entry*> right;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    left.clear();
    right.clear();
    while (j < entries.size() && entries[j].hash == entries[i].hash) {
      const Index::Entry& e = entries[j];
      if (e.doc == da) {
        left.push_back(&e);
      } else if (targets.contains(e.doc)) {
        right.push_back(&e);
      }
      ++j;
    }
    i = j;
    if (left.empty() || right.empty()) continue;
    for (const Index::Entry* x : left) {
      std::vector<std::uint32_t> am;
      for (const Index::Entry* y : right) {
        if (!index.same_stems(*x, *y)) continue;
        if (am.empty()) am = index.members(*x);
        ElementaryMatch m;
        m.doc_a = ids[da];
        m.doc_b = ids[y->doc];
        m.a_members = am;
        m.b_members = index.members(*y);
        m.a_span = member_span(a, m.a_members);
        m.b_span = member_span(*docs[y->doc], m.b_members);
        out[y->doc].push_back(std::move(m));
      }
    }
  }
  for (auto& [doc, matches] : out) {
    std::sort(matches.begin(), matches.end(), match_less);
    matches.erase(std::unique(matches.begin(), matches.end(),
                              [](const ElementaryMatch& x, const ElementaryMatch& y) {
                                return x.a_members == y.a_members && x.b_members == y.b_members;
                              }),
                  matches.end());
  }
  return out;
}

PairReport finish(std::string doc_a, std::string doc_b, std::vector<ElementaryMatch> matches,
                  const AnalyzedDocument& a, const AnalyzedDocument& b, const AnalyzedCorpus& corpus,
                  const DetectionParams& params) {
  PairReport r;
  r.doc_a = std::move(doc_a);
  r.doc_b = std::move(doc_b);
  r.a_length = a.text.size();
  r.b_length = b.text.size();
  r.params = params;
  r.corpus_digest = corpus.corpus_digest;
  r.match_count = matches.size();
  std::vector<ReuseBlock> blocks = splice(std::move(matches), params.effective_splice_gap());
  r.spliced_count = blocks.size();
  score_blocks(blocks, a, b, corpus.strength);
  r.blocks = filter_blocks(std::move(blocks), params.s_min);
  sort_blocks(r.blocks);
  r.zones = aggregate_zones(r.blocks);
  return r;
}

}  // namespace

ElementaryMatch mirror(const ElementaryMatch& m) {
  return {m.doc_b, m.doc_a, m.b_members, m.a_members, m.b_span, m.a_span};
}

PairReport mirror(const PairReport& r) {
  PairReport out;
  out.doc_a = r.doc_b;
  out.doc_b = r.doc_a;
  out.a_length = r.b_length;
  out.b_length = r.a_length;
  out.params = r.params;
  out.corpus_digest = r.corpus_digest;
  out.match_count = r.match_count;
  out.spliced_count = r.spliced_count;
  for (const ReuseBlock& b : r.blocks) {
    ReuseBlock m;
    m.doc_a = b.doc_b;
    m.doc_b = b.doc_a;
    for (const ElementaryMatch& e : b.matches) m.matches.push_back(mirror(e));
    m.a_span = b.b_span;
    m.b_span = b.a_span;
    m.strong_count = b.strong_count;
    m.score = b.score;
    out.blocks.push_back(std::move(m));
  }
  sort_blocks(out.blocks);
  out.zones = aggregate_zones(out.blocks);
  return out;
}

std::vector<ElementaryMatch> find_matches(const Index& index, const AnalyzedCorpus& corpus,
                                          std::string_view doc_a, std::string_view doc_b) {
  if (doc_a == doc_b) {
    throw UsageError("cannot compare document " + std::string(doc_a) +
                     " with itself; ingest the second text as a separate document");
  }
  const std::uint32_t da = require_index(index, doc_a);
  const std::uint32_t db = require_index(index, doc_b);
  auto found = collect(index, corpus, da, {db});
  auto it = found.find(db);
  return it == found.end() ? std::vector<ElementaryMatch>{} : std::move(it->second);
}

std::vector<ReuseBlock> splice(std::vector<ElementaryMatch> matches, std::size_t gap) {
  std::sort(matches.begin(), matches.end(), [](const ElementaryMatch& x, const ElementaryMatch& y) {
    return std::make_tuple(x.a_anchor(), x.b_anchor(), std::cref(x.a_members), std::cref(x.b_members)) <
           std::make_tuple(y.a_anchor(), y.b_anchor(), std::cref(y.a_members), std::cref(y.b_members));
  });

  std::vector<ReuseBlock> blocks;
  std::vector<std::size_t> active;  // blocks whose last a_anchor is within reach
  for (ElementaryMatch& m : matches) {
    const std::uint32_t a = m.a_anchor();
    const std::uint32_t b = m.b_anchor();
    std::erase_if(active, [&](std::size_t k) { return a - blocks[k].matches.back().a_anchor() > gap; });

    std::size_t best = blocks.size();
    std::size_t best_cost = 0;
    for (std::size_t k : active) {
      const ElementaryMatch& last = blocks[k].matches.back();
      const std::uint32_t la = last.a_anchor();
      const std::uint32_t lb = last.b_anchor();
      if (b < lb || b - lb > gap) continue;
      const std::size_t cost = (a - la) + (b - lb);
      if (best == blocks.size() || cost < best_cost || (cost == best_cost && k < best)) {
        best = k;
        best_cost = cost;
      }
    }
    if (best == blocks.size()) {
      ReuseBlock blk;
      blk.doc_a = m.doc_a;
      blk.doc_b = m.doc_b;
      blk.a_span = m.a_span;
      blk.b_span = m.b_span;
      blk.matches.push_back(std::move(m));
      active.push_back(blocks.size());
      blocks.push_back(std::move(blk));
    } else {
      ReuseBlock& blk = blocks[best];
      blk.a_span = hull(blk.a_span, m.a_span);
      blk.b_span = hull(blk.b_span, m.b_span);
      blk.matches.push_back(std::move(m));
    }
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].block_id = i;
  return blocks;
}

void score_blocks(std::vector<ReuseBlock>& blocks, const AnalyzedDocument& a, const AnalyzedDocument& b,
                  const StrengthMap& strength) {
  (void)b;
  for (ReuseBlock& blk : blocks) {
    std::set<std::string_view> stems;
    for (const ElementaryMatch& m : blk.matches) {
      for (std::uint32_t i : m.a_members) stems.insert(a.content_token(i).stem);
    }
    blk.score = stems.size();
    blk.strong_count = static_cast<std::size_t>(
        std::count_if(stems.begin(), stems.end(), [&](std::string_view s) { return strength.is_strong(s); }));
  }
}

std::vector<ReuseBlock> filter_blocks(std::vector<ReuseBlock> blocks, std::size_t s_min) {
  std::erase_if(blocks, [&](const ReuseBlock& b) { return b.strong_count < s_min; });
  return blocks;
}

std::vector<SimilarityZone> aggregate_zones(const std::vector<ReuseBlock>& blocks, std::size_t radius) {
  std::vector<SimilarityZone> zones;
  for (const ReuseBlock& b : blocks) {
    SimilarityZone z;
    z.doc_a = b.doc_a;
    z.doc_b = b.doc_b;
    z.a_span = b.a_span;
    z.b_span = b.b_span;
    z.block_ids = {b.block_id};
    zones.push_back(std::move(z));
  }
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < zones.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < zones.size(); ++j) {
        if (gap_between(zones[i].a_span, zones[j].a_span) <= radius &&
            gap_between(zones[i].b_span, zones[j].b_span) <= radius) {
          zones[i].a_span = hull(zones[i].a_span, zones[j].a_span);
          zones[i].b_span = hull(zones[i].b_span, zones[j].b_span);
          zones[i].block_ids.insert(zones[i].block_ids.end(), zones[j].block_ids.begin(),
                                    zones[j].block_ids.end());
          zones.erase(zones.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
          break;
        }
      }
    }
  }
  for (SimilarityZone& z : zones) {
    std::sort(z.block_ids.begin(), z.block_ids.end());
    const double side = (static_cast<double>(z.a_span.length()) + static_cast<double>(z.b_span.length())) / 2.0;
    z.density = side > 0 ? static_cast<double>(z.block_ids.size()) / side : 0.0;
  }
  std::sort(zones.begin(), zones.end(), [](const SimilarityZone& x, const SimilarityZone& y) {
    return std::tie(x.a_span, x.b_span) < std::tie(y.a_span, y.b_span);
  });
  for (std::size_t i = 0; i < zones.size(); ++i) zones[i].zone_id = i;
  return zones;
}

ContextPair extract_context(const ReuseBlock& block, const AnalyzedDocument& a, const AnalyzedDocument& b,
                            std::size_t radius) {
  auto side = [&](const AnalyzedDocument& doc, const Span& hull_span, bool first, Span& range,
                  std::string& excerpt, std::vector<Span>& highlights) {
    const std::size_t len = doc.text.size();
    range.start = hull_span.start > radius ? hull_span.start - radius : 0;
    range.end = std::min(len, hull_span.end + radius);
    excerpt = unicode::encode_utf8(std::u32string_view(doc.text).substr(range.start, range.end - range.start));
    std::set<std::uint32_t> members;
    for (const ElementaryMatch& m : block.matches) {
      const auto& ms = first ? m.a_members : m.b_members;
      members.insert(ms.begin(), ms.end());
    }
    for (std::uint32_t i : members) {
      const Span s = doc.content_token(i).span;
      highlights.push_back({s.start - range.start, s.end - range.start});
    }
  };
  ContextPair out;
  out.block_id = block.block_id;
  side(a, block.a_span, true, out.a_range, out.a_excerpt, out.a_highlights);
  side(b, block.b_span, false, out.b_range, out.b_excerpt, out.b_highlights);
  return out;
}

PairReport detect_pair(const Index& index, const AnalyzedCorpus& corpus, std::string_view doc_a,
                       std::string_view doc_b, const DetectionParams& params) {
  check_params(index, params);
  if (doc_a == doc_b) {
    throw UsageError("cannot compare document " + std::string(doc_a) +
                     " with itself; ingest the second text as a separate document");
  }
  const bool reversed = doc_b < doc_a;
  const std::string_view lo = reversed ? doc_b : doc_a;
  const std::string_view hi = reversed ? doc_a : doc_b;
  std::vector<ElementaryMatch> matches = find_matches(index, corpus, lo, hi);
  PairReport r = finish(std::string(lo), std::string(hi), std::move(matches), require_doc(corpus, lo),
                        require_doc(corpus, hi), corpus, params);
  return reversed ? mirror(r) : r;
}

std::vector<PairReport> detect_all(const Index& index, const AnalyzedCorpus& corpus, std::string_view doc_a,
                                   const DetectionParams& params) {
  check_params(index, params);
  const std::uint32_t da = require_index(index, doc_a);
  std::vector<PairReport> out;
  for (std::uint32_t d = 0; d < index.doc_ids().size(); ++d) {
    if (d == da) continue;
    out.push_back(detect_pair(index, corpus, doc_a, index.doc_ids()[d], params));
  }
  return out;
}

}  // namespace palimpsest
