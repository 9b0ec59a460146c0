#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "palimpsest/gapped_index.hpp"
#include "palimpsest/language.hpp"
#include "palimpsest/text_pipeline.hpp"

namespace palimpsest {

struct Config {
  std::filesystem::path root = "corpus";
  DetectionParams params;
  Language language = Language::French;
  std::optional<std::filesystem::path> stoplist;
  std::optional<std::filesystem::path> strength_overrides;
  StrengthConfig strength;
  double overlap_theta = 0.1;
  double beta = 0.5;
  std::string bind_host = "127.0.0.1";
  std::uint16_t port = 8420;
  unsigned workers = 2;
};

// `key = value` lines, '#' comments, optional [section] headers (ignored
// for lookup). Strings may be quoted. Relative paths resolve against `base`.
// Keys: root, language, stoplist, strength_overrides, weak_df, weak_rank,
// n_w, n_h, s_min, splice_gap ("auto" or a number), overlap_theta, beta,
// bind, port, workers.
Config parse_config(std::string_view text, const std::filesystem::path& base = {});
Config load_config(const std::filesystem::path& path);

// PALIMPSEST_ROOT, when set and non-empty, replaces the corpus root.
void apply_environment(Config& config);

// Reads the stoplist and override files named by the config.
PipelineConfig pipeline_config(const Config& config);

}  // namespace palimpsest
