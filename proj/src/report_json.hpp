#pragma once

#include "json.hpp"
#include "palimpsest/report.hpp"

namespace palimpsest::json_io {

using nlohmann::json;

json span_json(const Span& s);
Span parse_span(const json& j);
json params_json(const DetectionParams& p);
json block_json(const ReuseBlock& b);
json zone_json(const SimilarityZone& z);
json report_json(const PairReport& r);
json context_json(const ContextPair& c);
PairReport parse_report(const json& j);

}  // namespace palimpsest::json_io
