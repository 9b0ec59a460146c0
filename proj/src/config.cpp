#include "palimpsest/config.hpp"

#include <charconv>
#include <cstdlib>

#include "palimpsest/error.hpp"
#include "fsutil.hpp"

namespace palimpsest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Line {
  std::size_t no;
  std::string key;
};

[[noreturn]] void bad(const Line& l, const std::string& what) {
  throw DataError("config line " + std::to_string(l.no) + " (" + l.key + "): " + what);
}

template <typename T>
T number(const Line& l, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(l, "expected a number, got '" + std::string(v) + "'");
  return out;
}

std::filesystem::path path_value(std::string_view v, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

Config parse_config(std::string_view text, const std::filesystem::path& base) {
  Config c;
  std::size_t pos = 0;
  std::size_t no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw DataError("config line " + std::to_string(no) + ": bad section header");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError("config line " + std::to_string(no) + ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (!value.empty() && (value.front() == '"' || value.front() == '\'')) {
      const char q = value.front();
      std::size_t close = value.find(q, 1);
      if (close == std::string_view::npos) {
        throw DataError("config line " + std::to_string(no) + ": unterminated string");
      }
      value = value.substr(1, close - 1);
    } else if (std::size_t hash = value.find('#'); hash != std::string_view::npos) {
      value = trim(value.substr(0, hash));
    }
    const Line l{no, key};

    if (key == "root") {
      c.root = path_value(value, base);
    } else if (key == "language" || key == "lang") {
      try {
        c.language = parse_language(value);
      } catch (const Error& e) {
        bad(l, e.what());
      }
    } else if (key == "stoplist") {
      c.stoplist = path_value(value, base);
    } else if (key == "strength_overrides") {
      c.strength_overrides = path_value(value, base);
    } else if (key == "weak_df") {
      c.strength.weak_df = number<double>(l, value);
    } else if (key == "weak_rank") {
      c.strength.weak_rank = number<std::size_t>(l, value);
    } else if (key == "n_w") {
      c.params.n_w = number<std::size_t>(l, value);
    } else if (key == "n_h") {
      c.params.n_h = number<std::size_t>(l, value);
    } else if (key == "s_min") {
      c.params.s_min = number<std::size_t>(l, value);
    } else if (key == "splice_gap") {
      if (value == "auto") {
        c.params.splice_gap.reset();
      } else {
        c.params.splice_gap = number<std::size_t>(l, value);
      }
    } else if (key == "overlap_theta") {
      c.overlap_theta = number<double>(l, value);
    } else if (key == "beta") {
      c.beta = number<double>(l, value);
    } else if (key == "bind") {
      c.bind_host = std::string(value);
    } else if (key == "port") {
      c.port = number<std::uint16_t>(l, value);
    } else if (key == "workers") {
      c.workers = number<unsigned>(l, value);
      if (c.workers == 0) bad(l, "workers must be ≥ 1");
    } else {
      bad(l, "unknown key");
    }
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  return parse_config(fsutil::read_file(path), path.parent_path());
}

void apply_environment(Config& config) {
  if (const char* root = std::getenv("PALIMPSEST_ROOT"); root && *root) config.root = root;
}

PipelineConfig pipeline_config(const Config& config) {
  PipelineConfig p;
  p.language = config.language;
  if (config.stoplist) p.stoplist = load_stoplist(*config.stoplist);
  if (config.strength_overrides) p.overrides = load_strength_overrides(*config.strength_overrides);
  p.strength = config.strength;
  return p;
}

}  // namespace palimpsest
