#include "palimpsest/report.hpp"

#include "palimpsest/error.hpp"
#include "report_json.hpp"

namespace palimpsest {

namespace json_io {

json span_json(const Span& s) { return json::array({s.start, s.end}); }

Span parse_span(const json& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("span must be [start, end]");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

json params_json(const DetectionParams& p) {
  return {{"n_w", p.n_w},
          {"n_h", p.n_h},
          {"s_min", p.s_min},
          {"splice_gap", p.effective_splice_gap()},
          {"splice_gap_auto", !p.splice_gap.has_value()}};
}

json block_json(const ReuseBlock& b) {
  json matches = json::array();
  for (const ElementaryMatch& m : b.matches) {
    matches.push_back({{"a_members", m.a_members},
                       {"b_members", m.b_members},
                       {"a_span", span_json(m.a_span)},
                       {"b_span", span_json(m.b_span)}});
  }
  return {{"block_id", b.block_id},      {"a_span", span_json(b.a_span)}, {"b_span", span_json(b.b_span)},
          {"strong_count", b.strong_count}, {"score", b.score},               {"matches", matches}};
}

json zone_json(const SimilarityZone& z) {
  return {{"zone_id", z.zone_id},
          {"a_span", span_json(z.a_span)},
          {"b_span", span_json(z.b_span)},
          {"block_ids", z.block_ids},
          {"density", z.density}};
}

json report_json(const PairReport& r) {
  json blocks = json::array();
  for (const ReuseBlock& b : r.blocks) blocks.push_back(block_json(b));
  json zones = json::array();
  for (const SimilarityZone& z : r.zones) zones.push_back(zone_json(z));
  return {{"schema_version", kSchemaVersion},
          {"kind", "pair_report"},
          {"corpus_digest", r.corpus_digest},
          {"doc_a", r.doc_a},
          {"doc_b", r.doc_b},
          {"a_length", r.a_length},
          {"b_length", r.b_length},
          {"params", params_json(r.params)},
          {"match_count", r.match_count},
          {"spliced_block_count", r.spliced_count},
          {"blocks", blocks},
          {"zones", zones}};
}

json context_json(const ContextPair& c) {
  json ah = json::array();
  for (const Span& s : c.a_highlights) ah.push_back(span_json(s));
  json bh = json::array();
  for (const Span& s : c.b_highlights) bh.push_back(span_json(s));
  return {{"schema_version", kSchemaVersion},
          {"kind", "context_pair"},
          {"block_id", c.block_id},
          {"a_range", span_json(c.a_range)},
          {"b_range", span_json(c.b_range)},
          {"a_excerpt", c.a_excerpt},
          {"b_excerpt", c.b_excerpt},
          {"a_highlights", ah},
          {"b_highlights", bh}};
}

PairReport parse_report(const json& j) {
  if (j.value("schema_version", 0) != kSchemaVersion) throw DataError("unsupported report schema version");
  PairReport r;
  r.corpus_digest = j.at("corpus_digest").get<std::string>();
  r.doc_a = j.at("doc_a").get<std::string>();
  r.doc_b = j.at("doc_b").get<std::string>();
  r.a_length = j.at("a_length").get<std::size_t>();
  r.b_length = j.at("b_length").get<std::size_t>();
  const json& p = j.at("params");
  r.params.n_w = p.at("n_w").get<std::size_t>();
  r.params.n_h = p.at("n_h").get<std::size_t>();
  r.params.s_min = p.at("s_min").get<std::size_t>();
  if (!p.value("splice_gap_auto", false)) r.params.splice_gap = p.at("splice_gap").get<std::size_t>();
  r.match_count = j.at("match_count").get<std::size_t>();
  r.spliced_count = j.at("spliced_block_count").get<std::size_t>();
  for (const json& bj : j.at("blocks")) {
    ReuseBlock b;
    b.block_id = bj.at("block_id").get<std::size_t>();
    b.doc_a = r.doc_a;
    b.doc_b = r.doc_b;
    b.a_span = parse_span(bj.at("a_span"));
    b.b_span = parse_span(bj.at("b_span"));
    b.strong_count = bj.at("strong_count").get<std::size_t>();
    b.score = bj.at("score").get<std::size_t>();
    for (const json& mj : bj.at("matches")) {
      ElementaryMatch m;
      m.doc_a = r.doc_a;
      m.doc_b = r.doc_b;
      m.a_members = mj.at("a_members").get<std::vector<std::uint32_t>>();
      m.b_members = mj.at("b_members").get<std::vector<std::uint32_t>>();
      m.a_span = parse_span(mj.at("a_span"));
      m.b_span = parse_span(mj.at("b_span"));
      b.matches.push_back(std::move(m));
    }
    r.blocks.push_back(std::move(b));
  }
  for (const json& zj : j.at("zones")) {
    SimilarityZone z;
    z.zone_id = zj.at("zone_id").get<std::size_t>();
    z.doc_a = r.doc_a;
    z.doc_b = r.doc_b;
    z.a_span = parse_span(zj.at("a_span"));
    z.b_span = parse_span(zj.at("b_span"));
    z.block_ids = zj.at("block_ids").get<std::vector<std::size_t>>();
    z.density = zj.at("density").get<double>();
    r.zones.push_back(std::move(z));
  }
  return r;
}

}  // namespace json_io

std::string render_report(const PairReport& report) { return json_io::report_json(report).dump(2) + "\n"; }

std::string render_reports(const std::vector<PairReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const PairReport& r : reports) arr.push_back(json_io::report_json(r));
  nlohmann::json doc = {{"schema_version", kSchemaVersion}, {"kind", "report_set"}, {"reports", arr}};
  return doc.dump(2) + "\n";
}

std::string render_context(const ContextPair& context) { return json_io::context_json(context).dump(2) + "\n"; }

PairReport parse_report(const std::string& text) {
  try {
    return json_io::parse_report(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace palimpsest
