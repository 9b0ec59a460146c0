#pragma once

#include <string>
#include <string_view>

namespace palimpsest {

enum class Language { French, English };

// Accepts "fr"/"french" and "en"/"english"; anything else is a UsageError.
Language parse_language(std::string_view tag);
std::string_view language_tag(Language lang);

}  // namespace palimpsest
