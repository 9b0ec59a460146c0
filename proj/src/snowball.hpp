#pragma once

// Minimal runtime for Snowball-generated stemming algorithms: a string with
// cursor, limits and slice markers, operating on code points.

#include <span>
#include <string>
#include <string_view>

namespace palimpsest::snowball {

struct Among {
  std::u32string_view s;
  int result;
};

class Env {
 public:
  explicit Env(std::u32string word);

  std::u32string current;
  int cursor = 0;
  int limit = 0;
  int limit_backward = 0;
  int bra = 0;
  int ket = 0;

  // `group` lists the member characters of a grouping.
  bool in_grouping(std::u32string_view group);
  bool in_grouping_b(std::u32string_view group);
  bool out_grouping(std::u32string_view group);
  bool out_grouping_b(std::u32string_view group);
  // Advance until the next character is in `group`.
  bool go_out_grouping(std::u32string_view group);
  // Advance until the next character is not in `group`.
  bool go_in_grouping(std::u32string_view group);
  bool go_out_grouping_b(std::u32string_view group);

  bool eq_s(std::u32string_view s);
  bool eq_s_b(std::u32string_view s);

  // Longest entry matching at the cursor; moves the cursor past it.
  int find_among(std::span<const Among> v);
  int find_among_b(std::span<const Among> v);

  void slice_from(std::u32string_view s);
  void slice_del() { slice_from({}); }
  void insert(int c_bra, int c_ket, std::u32string_view s);

  char32_t at(int i) const { return current[static_cast<std::size_t>(i)]; }

 private:
  int replace_s(int c_bra, int c_ket, std::u32string_view s);
};

}  // namespace palimpsest::snowball
