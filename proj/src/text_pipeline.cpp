#include "palimpsest/text_pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "palimpsest/digest.hpp"
#include "palimpsest/error.hpp"
#include "palimpsest/stemmer.hpp"
#include "palimpsest/unicode.hpp"
#include "fsutil.hpp"

namespace palimpsest {

namespace {

bool is_hyphen(char32_t c) { return c == U'-' || c == U'‐' || c == U'‑'; }

bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'’' || c == U'ʼ'; }

bool word_char(char32_t c) { return unicode::is_letter(c) || unicode::is_combining_mark(c); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string stem_surface(std::string_view surface, Language lang) {
  std::string folded = fold(surface);
  std::string_view word = folded;
  while (!word.empty() && word.back() == '\'') word.remove_suffix(1);
  if (word.empty()) return folded;
  std::string s = stem(word, lang);
  return s.empty() ? std::string(word) : s;
}

}  // namespace

std::string_view strength_name(Strength s) { return s == Strength::Strong ? "STRONG" : "WEAK"; }

Strength parse_strength(std::string_view name) {
  if (name == "STRONG" || name == "strong") return Strength::Strong;
  if (name == "WEAK" || name == "weak") return Strength::Weak;
  throw DataError("unknown strength class: " + std::string(name));
}

std::string fold(std::string_view surface) {
  std::u32string text = unicode::to_lower(unicode::decode_utf8(surface));
  for (char32_t& c : text) {
    if (is_apostrophe(c)) c = U'\'';
  }
  return unicode::encode_utf8(text);
}

std::vector<Token> tokenize(std::u32string_view text, Language lang) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (!unicode::is_letter(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::size_t j = i + 1;
    while (true) {
      while (j < n && word_char(text[j])) ++j;
      if (j + 1 >= n || !unicode::is_letter(text[j + 1])) break;
      if (is_hyphen(text[j])) {
        j += 2;
        continue;
      }
      if (is_apostrophe(text[j])) {
        if (lang == Language::French) {
          ++j;
          break;
        }
        j += 2;
        continue;
      }
      break;
    }
    Token t;
    t.span = {start, j};
    t.surface = unicode::encode_utf8(text.substr(start, j - start));
    tokens.push_back(std::move(t));
    i = j;
  }
  return tokens;
}

std::vector<Token> tokenize(std::string_view utf8, Language lang) {
  std::u32string text = unicode::decode_utf8(utf8);
  return tokenize(std::u32string_view(text), lang);
}

void flag_stopwords(std::vector<Token>& tokens, const Stoplist& stoplist) {
  for (Token& t : tokens) t.is_stop = !stoplist.empty() && stoplist.contains(fold(t.surface));
}

void stem_tokens(std::vector<Token>& tokens, Language lang) {
  std::unordered_map<std::string, std::string> memo;
  for (Token& t : tokens) {
    auto it = memo.find(t.surface);
    if (it == memo.end()) it = memo.emplace(t.surface, stem_surface(t.surface, lang)).first;
    t.stem = it->second;
  }
}

void VocabularyStats::add_document(std::span<const std::string> content_stems) {
  ++doc_count;
  std::unordered_set<std::string_view> seen;
  for (const std::string& s : content_stems) {
    StemFrequency& f = stems[s];
    ++f.total_freq;
    if (seen.insert(s).second) ++f.doc_freq;
  }
}

void VocabularyStats::merge(const VocabularyStats& other) {
  doc_count += other.doc_count;
  for (const auto& [stem, f] : other.stems) {
    StemFrequency& mine = stems[stem];
    mine.doc_freq += f.doc_freq;
    mine.total_freq += f.total_freq;
  }
}

StrengthOverrides parse_strength_overrides(std::string_view text) {
  StrengthOverrides out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("strength overrides line " + std::to_string(line_no) + ": expected stem<TAB>class");
    }
    std::string_view stem = trim(line.substr(0, tab));
    std::string_view cls = trim(line.substr(tab + 1));
    if (stem.empty()) {
      throw DataError("strength overrides line " + std::to_string(line_no) + ": empty stem");
    }
    out[std::string(stem)] = parse_strength(cls);
  }
  return out;
}

StrengthOverrides load_strength_overrides(const std::filesystem::path& path) {
  return parse_strength_overrides(fsutil::read_file(path));
}

StrengthMap::StrengthMap(std::unordered_map<std::string, Strength> classes, StrengthOverrides overrides)
    : classes_(std::move(classes)), overrides_(std::move(overrides)) {}

Strength StrengthMap::of(std::string_view stem) const {
  std::string key(stem);
  if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
  if (auto it = classes_.find(key); it != classes_.end()) return it->second;
  return Strength::Strong;
}

StrengthMap classify_strength(const VocabularyStats& stats, const StrengthConfig& config,
                              const StrengthOverrides& overrides) {
  std::vector<std::pair<const std::string*, std::size_t>> ranked;
  ranked.reserve(stats.stems.size());
  for (const auto& [stem, f] : stats.stems) ranked.emplace_back(&stem, f.total_freq);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return *x.first < *y.first;
  });

  std::unordered_map<std::string, Strength> classes;
  classes.reserve(ranked.size());
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const std::string& stem = *ranked[r].first;
    const StemFrequency& f = stats.stems.at(stem);
    bool weak = r < config.weak_rank;
    if (stats.doc_count > 0) {
      weak = weak || static_cast<double>(f.doc_freq) / static_cast<double>(stats.doc_count) > config.weak_df;
    }
    classes.emplace(stem, weak ? Strength::Weak : Strength::Strong);
  }
  return StrengthMap(std::move(classes), overrides);
}

const Stoplist& PipelineConfig::effective_stoplist() const {
  return stoplist ? *stoplist : default_stoplist(language);
}

std::string PipelineConfig::digest() const {
  const Stoplist& stops = effective_stoplist();
  std::vector<std::string_view> sorted(stops.begin(), stops.end());
  std::sort(sorted.begin(), sorted.end());
  std::string material = "pipeline/1\n";
  material += language_tag(language);
  material += '\n';
  for (std::string_view w : sorted) {
    material += w;
    material += '\n';
  }
  return sha256_hex(material);
}

std::vector<std::string> AnalyzedDocument::content_stems() const {
  std::vector<std::string> out;
  out.reserve(content.size());
  for (std::uint32_t t : content) out.push_back(tokens[t].stem);
  return out;
}

AnalyzedDocument analyze_text(std::string doc_id, std::string_view text, const PipelineConfig& config) {
  AnalyzedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.text_digest = sha256_hex(text);
  doc.text = unicode::decode_utf8(text);
  doc.tokens = tokenize(std::u32string_view(doc.text), config.language);
  flag_stopwords(doc.tokens, config.effective_stoplist());
  stem_tokens(doc.tokens, config.language);
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (!doc.tokens[i].is_stop) doc.content.push_back(static_cast<std::uint32_t>(i));
  }
  return doc;
}

AnalyzedDocument analyze_document(const Document& doc, const PipelineConfig& config) {
  return analyze_text(doc.doc_id, doc.text, config);
}

void apply_strength(AnalyzedDocument& doc, const StrengthMap& strength) {
  for (Token& t : doc.tokens) {
    if (t.is_stop) {
      t.strength.reset();
    } else {
      t.strength = strength.of(t.stem);
    }
  }
}

const AnalyzedDocument* AnalyzedCorpus::find(std::string_view doc_id) const {
  for (const AnalyzedDocument& d : docs) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

AnalyzedCorpus analyze(std::vector<AnalyzedDocument> docs, const PipelineConfig& config,
                       std::string corpus_digest) {
  AnalyzedCorpus out;
  out.docs = std::move(docs);
  for (const AnalyzedDocument& d : out.docs) {
    std::vector<std::string> stems = d.content_stems();
    out.stats.add_document(stems);
  }
  out.strength = classify_strength(out.stats, config.strength, config.overrides);
  for (AnalyzedDocument& d : out.docs) apply_strength(d, out.strength);
  if (corpus_digest.empty()) {
    std::vector<std::pair<std::string, std::string>> members;
    for (const AnalyzedDocument& d : out.docs) members.emplace_back(d.doc_id, d.text_digest);
    corpus_digest = manifest_digest(members);
  }
  out.corpus_digest = std::move(corpus_digest);
  out.pipeline_digest = config.digest();
  return out;
}

AnalyzedCorpus analyze(const Corpus& corpus, const PipelineConfig& config, unsigned threads) {
  std::span<const Document> src = corpus.documents();
  std::vector<AnalyzedDocument> docs(src.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, src.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < src.size(); i = next++) {
      try {
        docs[i] = analyze_document(src[i], config);
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
  return analyze(std::move(docs), config, corpus.manifest_digest());
}

}  // namespace palimpsest
