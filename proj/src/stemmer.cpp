#include "palimpsest/stemmer.hpp"

#include "palimpsest/error.hpp"
#include "palimpsest/unicode.hpp"

namespace palimpsest {

Language parse_language(std::string_view tag) {
  if (tag == "fr" || tag == "french") return Language::French;
  if (tag == "en" || tag == "english") return Language::English;
  throw UsageError("unsupported language: " + std::string(tag));
}

std::string_view language_tag(Language lang) {
  return lang == Language::French ? "fr" : "en";
}

std::string stem(std::string_view lowercase_word, Language lang) {
  std::u32string word = unicode::decode_utf8(lowercase_word);
  word = lang == Language::French ? stem_french(std::move(word)) : stem_english(std::move(word));
  return unicode::encode_utf8(word);
}

}  // namespace palimpsest
