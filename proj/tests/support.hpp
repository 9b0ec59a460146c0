#pragma once

// Test-side helpers: fixture loading, random corpora with planted reuse, and
// a reference detector that uses no index.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "palimpsest/corpus.hpp"
#include "palimpsest/eval_harness.hpp"
#include "palimpsest/gapped_index.hpp"
#include "palimpsest/reuse_detect.hpp"
#include "palimpsest/text_pipeline.hpp"
#include "palimpsest/unicode.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace palimpsest;

inline fs::path source_dir() { return fs::path(PALIMPSEST_SOURCE_DIR); }
inline fs::path fixtures_dir() { return source_dir() / "fixtures"; }

inline std::string read_text(const fs::path& p) {
  std::FILE* f = std::fopen(p.string().c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::string out;
  char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  std::fclose(f);
  return out;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("palimpsest-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline std::vector<fs::path> fixture_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fixtures_dir() / "texts")) {
    if (e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// In-memory fixture corpus with titles from file stems.
inline Corpus fixture_corpus() {
  Corpus c("fixtures");
  for (const fs::path& p : fixture_files()) {
    DocumentMeta meta;
    meta.title = p.stem().string();
    meta.source_path = p.string();
    c.add(make_document(read_text(p), meta));
  }
  return c;
}

// Pipeline settings of the shipped fixture config.
inline PipelineConfig fixture_pipeline() {
  PipelineConfig p;
  p.language = Language::French;
  p.strength.weak_df = 0.5;
  p.strength.weak_rank = 10;
  return p;
}

// ---------------------------------------------------------------------------
// Brute-force window enumeration: every subset of the positions after the
// anchor, kept when its size is n_w - 1 and it lies within n_w - 1 + n_h.

inline std::vector<std::vector<std::uint32_t>> brute_windows(std::size_t len, std::size_t n_w, std::size_t n_h) {
  std::vector<std::vector<std::uint32_t>> out;
  if (n_w == 0) return out;
  const std::size_t reach = n_w - 1 + n_h;
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t avail = std::min(reach, len - 1 - i);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << avail); ++bits) {
      if (static_cast<std::size_t>(std::popcount(bits)) != n_w - 1) continue;
      std::vector<std::uint32_t> m{static_cast<std::uint32_t>(i)};
      for (std::size_t k = 0; k < avail; ++k) {
        if (bits >> k & 1) m.push_back(static_cast<std::uint32_t>(i + 1 + k));
      }
      out.push_back(std::move(m));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Reference detector.

struct RefMatch {
  std::vector<std::uint32_t> a, b;
  friend auto operator<=>(const RefMatch&, const RefMatch&) = default;
};

inline std::vector<RefMatch> naive_matches(const AnalyzedDocument& da, const AnalyzedDocument& db, std::size_t n_w,
                                           std::size_t n_h) {
  const std::vector<std::string> sa = da.content_stems();
  const std::vector<std::string> sb = db.content_stems();
  const auto wa = brute_windows(sa.size(), n_w, n_h);
  const auto wb = brute_windows(sb.size(), n_w, n_h);
  std::vector<RefMatch> out;
  for (const auto& x : wa) {
    for (const auto& y : wb) {
      bool same = true;
      for (std::size_t k = 0; k < x.size() && same; ++k) same = sa[x[k]] == sb[y[k]];
      if (same) out.push_back({x, y});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct RefBlock {
  std::vector<RefMatch> matches;  // sorted
  std::size_t a_start = 0, a_end = 0, b_start = 0, b_end = 0;
  std::size_t strong = 0, score = 0;
  friend auto operator<=>(const RefBlock&, const RefBlock&) = default;
};

// Same chaining rule, written directly: visit matches by anchors; attach to
// the eligible block (last match within gap on both axes, never going back)
// with the smallest combined step, earliest block on ties.
inline std::vector<std::vector<RefMatch>> naive_splice(std::vector<RefMatch> matches, std::size_t gap) {
  std::sort(matches.begin(), matches.end(), [](const RefMatch& x, const RefMatch& y) {
    return std::tie(x.a[0], x.b[0], x.a, x.b) < std::tie(y.a[0], y.b[0], y.a, y.b);
  });
  std::vector<std::vector<RefMatch>> blocks;
  for (const RefMatch& m : matches) {
    long best = -1;
    long best_cost = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const RefMatch& last = blocks[k].back();
      const long da = static_cast<long>(m.a[0]) - static_cast<long>(last.a[0]);
      const long db = static_cast<long>(m.b[0]) - static_cast<long>(last.b[0]);
      if (da < 0 || db < 0 || da > static_cast<long>(gap) || db > static_cast<long>(gap)) continue;
      if (best < 0 || da + db < best_cost) {
        best = static_cast<long>(k);
        best_cost = da + db;
      }
    }
    if (best < 0) {
      blocks.push_back({m});
    } else {
      blocks[static_cast<std::size_t>(best)].push_back(m);
    }
  }
  return blocks;
}

inline std::vector<RefBlock> naive_blocks(const AnalyzedDocument& da, const AnalyzedDocument& db,
                                          const StrengthMap& strength, const DetectionParams& p,
                                          const std::vector<RefMatch>* matches = nullptr) {
  std::vector<RefBlock> out;
  for (auto& chain : naive_splice(matches ? *matches : naive_matches(da, db, p.n_w, p.n_h), p.effective_splice_gap())) {
    RefBlock b;
    std::set<std::string> stems;
    b.a_start = b.b_start = SIZE_MAX;
    for (const RefMatch& m : chain) {
      for (std::uint32_t i : m.a) stems.insert(da.content_token(i).stem);
      b.a_start = std::min(b.a_start, da.content_token(m.a.front()).span.start);
      b.a_end = std::max(b.a_end, da.content_token(m.a.back()).span.end);
      b.b_start = std::min(b.b_start, db.content_token(m.b.front()).span.start);
      b.b_end = std::max(b.b_end, db.content_token(m.b.back()).span.end);
    }
    b.score = stems.size();
    for (const std::string& s : stems) b.strong += strength.is_strong(s) ? 1 : 0;
    if (b.strong < p.s_min) continue;
    b.matches = std::move(chain);
    std::sort(b.matches.begin(), b.matches.end());
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<RefBlock> to_ref(const std::vector<ReuseBlock>& blocks) {
  std::vector<RefBlock> out;
  for (const ReuseBlock& blk : blocks) {
    RefBlock b;
    for (const ElementaryMatch& m : blk.matches) b.matches.push_back({m.a_members, m.b_members});
    std::sort(b.matches.begin(), b.matches.end());
    b.a_start = blk.a_span.start;
    b.a_end = blk.a_span.end;
    b.b_start = blk.b_span.start;
    b.b_end = blk.b_span.end;
    b.strong = blk.strong_count;
    b.score = blk.score;
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Random French-like documents with planted distorted copies.

inline const std::vector<std::string>& content_words() {
  static const std::vector<std::string> words = {
      "rides", "front", "exploits", "rage", "désespoir", "vieillesse", "ennemie", "infamie", "travaux",
      "guerriers", "jour", "lauriers", "partis", "fils", "éclat", "dignité", "cœur", "vanité", "amour",
      "justice", "hommes", "crainte", "courage", "injustice", "ordre", "caroncule", "charnue", "forme",
      "conique", "rides", "transversales", "profondes", "bec", "supérieur", "voix", "harmonieuse", "discours",
      "charme", "manières", "délicatesse", "sujets", "conversation", "mots", "langage", "raillerie",
      "critique", "assurance", "compagnie", "vérité", "discussion", "humeur", "politesse", "empressement",
      "respect", "ombre", "sphère", "puissance", "grâce", "choses", "vue", "patrie", "intimité", "effort",
      "luxe", "sentiments", "défauts", "ridicules", "âges", "tact", "culte", "main", "fleur", "capsule",
      "corsets", "rubans", "jupes", "brocatelle", "plis", "fraises", "manches", "dentelles", "chevelure",
      "épaules", "tableau", "seigneur", "vin", "biscuits", "nez", "petitesse", "lèvres", "bonté", "idées",
      "intelligence", "perruque", "espoir", "pension", "ambition", "naissons", "chacun", "tend", "soi",
      "gravé", "sortait", "mignonne", "frappée", "fossettes", "pistil", "calice", "gravures", "diamants",
      "pierreries", "toilette", "physionomie", "costumes", "tulipe", "page", "chien", "manchon", "allées",
      "buis", "parterre", "siècle", "beauté", "robes", "lampas", "feutres", "perles", "plumes", "chaînes",
      "rivières", "étincelles", "blancheur", "poitrine", "dames", "temps", "femme", "bonheur", "personne",
      "parole", "faute", "ange", "gens", "rien", "yeux", "regard", "ville", "maison", "porte", "fenêtre",
      "nuit", "matin", "soleil", "lune", "mer", "terre", "ciel", "feu", "eau", "air", "monde", "vie",
      "mort", "âme", "esprit", "corps", "sang", "larmes", "sourire", "silence", "chant", "poème", "lettre",
      "livre", "page", "histoire", "roman", "auteur", "lecteur", "plume", "encre", "papier", "théâtre",
  };
  return words;
}

inline const std::vector<std::string>& stop_words() {
  static const std::vector<std::string> words = {"le", "la", "les", "de", "des", "du", "et", "un", "une",
                                                 "en", "à", "que", "qui", "sur", "son", "ses", "sa",
                                                 "pour", "par", "dans", "il", "elle", "ne", "pas", "au"};
  return words;
}

class TextGen {
 public:
  explicit TextGen(std::uint64_t seed) : rng_(seed) {}

  // Zipf-like draw so some stems recur often.
  std::string content() {
    const auto& w = content_words();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng_);
    const std::size_t i = static_cast<std::size_t>(std::pow(x, 2.2) * static_cast<double>(w.size()));
    return w[std::min(i, w.size() - 1)];
  }
  std::string stop() {
    const auto& w = stop_words();
    return w[std::uniform_int_distribution<std::size_t>(0, w.size() - 1)(rng_)];
  }

  // Content-word sequence (stop words interleaved when rendered).
  std::vector<std::string> words(std::size_t n_content) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n_content; ++i) out.push_back(content());
    return out;
  }

  // Insertions, deletions, substitutions and inflection changes.
  std::vector<std::string> distort(const std::vector<std::string>& src, double rate) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::string> out;
    for (const std::string& w : src) {
      const double r = u(rng_);
      if (r < rate * 0.25) continue;
      if (r < rate * 0.5) {
        out.push_back(content());
        continue;
      }
      if (r < rate * 0.75) {
        out.push_back(w);
        out.push_back(content());
        continue;
      }
      if (r < rate) {
        out.push_back(w.back() == 's' ? w.substr(0, w.size() - 1) : w + "s");
        continue;
      }
      out.push_back(w);
    }
    return out;
  }

  // Stop words and punctuation are interleaved; `offsets` receives the code
  // point range of every content word.
  std::string render(const std::vector<std::string>& content_seq, std::vector<Span>* offsets = nullptr) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::string out;
    std::size_t pos = 0;
    auto put = [&](const std::string& piece) {
      out += piece;
      pos += unicode::code_point_count(piece);
    };
    std::size_t since_break = 0;
    for (const std::string& w : content_seq) {
      if (u(rng_) < 0.5) put(stop() + " ");
      if (offsets) offsets->push_back({pos, pos + unicode::code_point_count(w)});
      put(w);
      ++since_break;
      if (u(rng_) < 0.12 || since_break > 12) {
        put(u(rng_) < 0.5 ? ". " : ", ");
        since_break = 0;
      } else {
        put(" ");
      }
    }
    return out;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct PlantedPair {
  std::string text_a;
  std::string text_b;
  std::vector<GoldSpan> gold;  // one per planted copy, doc ids "doc-a"/"doc-b"
};

// Two documents of at most `max_content` content words; B carries `copies`
// distorted reuses of random segments of A.
inline PlantedPair planted_pair(std::uint64_t seed, std::size_t max_content = 500, std::size_t copies = 3) {
  TextGen g(seed);
  std::uniform_int_distribution<std::size_t> seg_len(8, 30);
  const std::vector<std::string> a = g.words(max_content);
  std::vector<std::pair<std::size_t, std::size_t>> sources;
  std::vector<std::vector<std::string>> copy_words;
  std::size_t copied = 0;
  for (std::size_t c = 0; c < copies; ++c) {
    const std::size_t len = seg_len(g.rng());
    const std::size_t at = std::uniform_int_distribution<std::size_t>(0, a.size() - len)(g.rng());
    sources.emplace_back(at, at + len);
    copy_words.push_back(g.distort({a.begin() + static_cast<std::ptrdiff_t>(at), a.begin() + static_cast<std::ptrdiff_t>(at + len)}, 0.25));
    if (copy_words.back().empty()) copy_words.back().push_back(a[at]);
    copied += copy_words.back().size();
  }
  const std::size_t filler = max_content > copied + 20 ? max_content - copied - 20 : 0;
  std::vector<std::size_t> cuts;
  for (std::size_t c = 0; c < copies; ++c) cuts.push_back(std::uniform_int_distribution<std::size_t>(0, filler)(g.rng()));
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::string> filler_words = g.words(filler);
  std::vector<std::string> b;
  std::vector<std::pair<std::size_t, std::size_t>> copies_at;
  std::size_t taken = 0;
  for (std::size_t c = 0; c < copies; ++c) {
    b.insert(b.end(), filler_words.begin() + static_cast<std::ptrdiff_t>(taken), filler_words.begin() + static_cast<std::ptrdiff_t>(cuts[c]));
    taken = cuts[c];
    copies_at.emplace_back(b.size(), b.size() + copy_words[c].size());
    b.insert(b.end(), copy_words[c].begin(), copy_words[c].end());
  }
  b.insert(b.end(), filler_words.begin() + static_cast<std::ptrdiff_t>(taken), filler_words.end());

  std::vector<Span> oa, ob;
  PlantedPair p;
  p.text_a = g.render(a, &oa);
  p.text_b = g.render(b, &ob);
  for (std::size_t c = 0; c < copies; ++c) {
    GoldSpan gs;
    gs.doc_a = "doc-a";
    gs.doc_b = "doc-b";
    gs.a_span = {oa[sources[c].first].start, oa[sources[c].second - 1].end};
    gs.b_span = {ob[copies_at[c].first].start, ob[copies_at[c].second - 1].end};
    gs.label = "planted " + std::to_string(c);
    p.gold.push_back(gs);
  }
  return p;
}

inline AnalyzedCorpus analyze_pair(const std::string& a, const std::string& b, const PipelineConfig& cfg) {
  std::vector<AnalyzedDocument> docs;
  docs.push_back(analyze_text("doc-a", a, cfg));
  docs.push_back(analyze_text("doc-b", b, cfg));
  return analyze(std::move(docs), cfg);
}

inline PipelineConfig random_pipeline() {
  PipelineConfig p;
  p.language = Language::French;
  p.strength.weak_df = 1.0;
  p.strength.weak_rank = 15;
  return p;
}

}  // namespace testsupport
