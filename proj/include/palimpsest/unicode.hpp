#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace palimpsest::unicode {

// Strict UTF-8 decoding. Throws DecodeError carrying the byte offset of the
// first ill-formed sequence (overlongs, surrogates and truncation included).
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view text);

// Converts bytes in a legacy encoding (any ICU converter name, e.g.
// "latin-1", "windows-1252") to UTF-8. "utf-8" is validated, not converted.
std::string to_utf8(std::string_view bytes, std::string_view encoding);

// Canonical composition (NFC).
std::u32string nfc(std::u32string_view text);

bool is_letter(char32_t c);
bool is_combining_mark(char32_t c);
bool is_control(char32_t c);
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view text);

std::size_t code_point_count(std::string_view utf8);

// Slice of a UTF-8 string by code point offsets [start, end).
std::string slice(std::u32string_view text, std::size_t start, std::size_t end);

}  // namespace palimpsest::unicode
