#pragma once

#include <string>
#include <string_view>

#include "palimpsest/language.hpp"

namespace palimpsest {

// Snowball stemmers (French, English/Porter2), ported from the published
// algorithm definitions. Input must already be lowercase UTF-8.
//
// stem is deterministic but not idempotent: the algorithms can strip again
// from their own output ("only" -> "onli" -> "on").
std::string stem(std::string_view lowercase_word, Language lang);

std::u32string stem_french(std::u32string word);
std::u32string stem_english(std::u32string word);

}  // namespace palimpsest
