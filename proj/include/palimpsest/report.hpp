#pragma once

#include <string>
#include <vector>

#include "palimpsest/reuse_detect.hpp"

namespace palimpsest {

inline constexpr int kSchemaVersion = 1;

// Pretty-printed JSON, newline-terminated. Offsets are code point indices.
std::string render_report(const PairReport& report);
std::string render_reports(const std::vector<PairReport>& reports);
std::string render_context(const ContextPair& context);

// Inverse of render_report.
PairReport parse_report(const std::string& json);

}  // namespace palimpsest
