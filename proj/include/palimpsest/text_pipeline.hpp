#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "palimpsest/corpus.hpp"
#include "palimpsest/language.hpp"
#include "palimpsest/span.hpp"

namespace palimpsest {

enum class Strength { Strong, Weak };

std::string_view strength_name(Strength s);
Strength parse_strength(std::string_view name);

struct Token {
  std::string surface;
  Span span;
  bool is_stop = false;
  std::string stem;
  std::optional<Strength> strength;  // set for content tokens only

  friend bool operator==(const Token&, const Token&) = default;
};

using Stoplist = std::unordered_set<std::string>;

// Shipped function-word lists. French includes the elided forms ("l'", "qu'").
const Stoplist& default_stoplist(Language lang);
// One lowercase form per line, '#' starts a comment.
Stoplist load_stoplist(const std::filesystem::path& path);
Stoplist parse_stoplist(std::string_view text);

// Lowercase and map typographic apostrophes to "'". Used for stoplist lookup
// and as stemmer input.
std::string fold(std::string_view surface);

// Maximal runs of letters and combining marks; a hyphen between two letters
// stays inside the token. In French an apostrophe between letters closes the
// token ("l'amour" -> "l'", "amour"); in English it stays inside.
std::vector<Token> tokenize(std::u32string_view text, Language lang);
std::vector<Token> tokenize(std::string_view utf8, Language lang);

void flag_stopwords(std::vector<Token>& tokens, const Stoplist& stoplist);

// Fills Token::stem for every token (stop tokens too, for display).
void stem_tokens(std::vector<Token>& tokens, Language lang);

struct StemFrequency {
  std::size_t doc_freq = 0;
  std::size_t total_freq = 0;
};

struct VocabularyStats {
  std::unordered_map<std::string, StemFrequency> stems;
  std::size_t doc_count = 0;

  void add_document(std::span<const std::string> content_stems);
  void merge(const VocabularyStats& other);
};

using StrengthOverrides = std::unordered_map<std::string, Strength>;

// "stem<TAB>STRONG|WEAK" per line; '#' comments and blank lines ignored.
StrengthOverrides load_strength_overrides(const std::filesystem::path& path);
StrengthOverrides parse_strength_overrides(std::string_view text);

struct StrengthConfig {
  double weak_df = 0.5;
  std::size_t weak_rank = 200;
};

class StrengthMap {
 public:
  StrengthMap() = default;
  StrengthMap(std::unordered_map<std::string, Strength> classes, StrengthOverrides overrides);

  // Stems never seen (and not overridden) are STRONG.
  Strength of(std::string_view stem) const;
  bool is_strong(std::string_view stem) const { return of(stem) == Strength::Strong; }
  std::size_t size() const noexcept { return classes_.size(); }

 private:
  std::unordered_map<std::string, Strength> classes_;
  StrengthOverrides overrides_;
};

// WEAK iff doc_freq / doc_count > weak_df, or the stem ranks among the
// weak_rank most frequent stems (total frequency descending, ties by stem).
// Overrides win.
StrengthMap classify_strength(const VocabularyStats& stats, const StrengthConfig& config,
                              const StrengthOverrides& overrides = {});

struct PipelineConfig {
  Language language = Language::French;
  std::optional<Stoplist> stoplist;  // default_stoplist(language) when unset
  StrengthConfig strength;
  StrengthOverrides overrides;

  const Stoplist& effective_stoplist() const;
  // Digest of everything that affects the stem stream (language, stoplist).
  std::string digest() const;
};

struct AnalyzedDocument {
  std::string doc_id;
  std::string text_digest;  // SHA-256 of the UTF-8 text
  std::u32string text;
  std::vector<Token> tokens;
  std::vector<std::uint32_t> content;  // token index per content_index

  std::size_t content_size() const noexcept { return content.size(); }
  const Token& content_token(std::size_t content_index) const {
    return tokens[content[content_index]];
  }
  std::vector<std::string> content_stems() const;
};

// Tokenize, flag and stem one document; strength is left unset.
AnalyzedDocument analyze_document(const Document& doc, const PipelineConfig& config);
AnalyzedDocument analyze_text(std::string doc_id, std::string_view text, const PipelineConfig& config);

void apply_strength(AnalyzedDocument& doc, const StrengthMap& strength);

struct AnalyzedCorpus {
  std::vector<AnalyzedDocument> docs;  // corpus order
  VocabularyStats stats;
  StrengthMap strength;
  std::string corpus_digest;
  std::string pipeline_digest;

  const AnalyzedDocument* find(std::string_view doc_id) const;
};

// Documents are analyzed in parallel (threads = 0 picks the hardware count);
// the result does not depend on the schedule.
AnalyzedCorpus analyze(const Corpus& corpus, const PipelineConfig& config, unsigned threads = 0);
AnalyzedCorpus analyze(std::vector<AnalyzedDocument> docs, const PipelineConfig& config,
                       std::string corpus_digest = {});

}  // namespace palimpsest
