#include "snowball.hpp"

namespace palimpsest::snowball {

namespace {

bool member(std::u32string_view group, char32_t c) {
  return group.find(c) != std::u32string_view::npos;
}

}  // namespace

Env::Env(std::u32string word)
    : current(std::move(word)),
      limit(static_cast<int>(current.size())),
      ket(static_cast<int>(current.size())) {}

bool Env::in_grouping(std::u32string_view group) {
  if (cursor >= limit || !member(group, at(cursor))) return false;
  ++cursor;
  return true;
}

bool Env::in_grouping_b(std::u32string_view group) {
  if (cursor <= limit_backward || !member(group, at(cursor - 1))) return false;
  --cursor;
  return true;
}

bool Env::out_grouping(std::u32string_view group) {
  if (cursor >= limit || member(group, at(cursor))) return false;
  ++cursor;
  return true;
}

bool Env::out_grouping_b(std::u32string_view group) {
  if (cursor <= limit_backward || member(group, at(cursor - 1))) return false;
  --cursor;
  return true;
}

bool Env::go_out_grouping(std::u32string_view group) {
  while (cursor < limit) {
    if (member(group, at(cursor))) return true;
    ++cursor;
  }
  return false;
}

bool Env::go_in_grouping(std::u32string_view group) {
  while (cursor < limit) {
    if (!member(group, at(cursor))) return true;
    ++cursor;
  }
  return false;
}

bool Env::go_out_grouping_b(std::u32string_view group) {
  while (cursor > limit_backward) {
    if (member(group, at(cursor - 1))) return true;
    --cursor;
  }
  return false;
}

bool Env::eq_s(std::u32string_view s) {
  const int n = static_cast<int>(s.size());
  if (limit - cursor < n) return false;
  if (std::u32string_view(current).substr(static_cast<std::size_t>(cursor), s.size()) != s) {
    return false;
  }
  cursor += n;
  return true;
}

bool Env::eq_s_b(std::u32string_view s) {
  const int n = static_cast<int>(s.size());
  if (cursor - limit_backward < n) return false;
  if (std::u32string_view(current).substr(static_cast<std::size_t>(cursor - n), s.size()) != s) {
    return false;
  }
  cursor -= n;
  return true;
}

int Env::find_among(std::span<const Among> v) {
  int best = -1;
  int best_len = -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int n = static_cast<int>(v[i].s.size());
    if (n <= best_len || limit - cursor < n) continue;
    if (std::u32string_view(current).substr(static_cast<std::size_t>(cursor), v[i].s.size()) ==
        v[i].s) {
      best = static_cast<int>(i);
      best_len = n;
    }
  }
  if (best < 0) return 0;
  cursor += best_len;
  return v[static_cast<std::size_t>(best)].result;
}

int Env::find_among_b(std::span<const Among> v) {
  int best = -1;
  int best_len = -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int n = static_cast<int>(v[i].s.size());
    if (n <= best_len || cursor - limit_backward < n) continue;
    if (std::u32string_view(current).substr(static_cast<std::size_t>(cursor - n), v[i].s.size()) ==
        v[i].s) {
      best = static_cast<int>(i);
      best_len = n;
    }
  }
  if (best < 0) return 0;
  cursor -= best_len;
  return v[static_cast<std::size_t>(best)].result;
}

int Env::replace_s(int c_bra, int c_ket, std::u32string_view s) {
  const int adjustment = static_cast<int>(s.size()) - (c_ket - c_bra);
  current.replace(static_cast<std::size_t>(c_bra), static_cast<std::size_t>(c_ket - c_bra), s);
  limit += adjustment;
  if (cursor >= c_ket) {
    cursor += adjustment;
  } else if (cursor > c_bra) {
    cursor = c_bra;
  }
  return adjustment;
}

void Env::slice_from(std::u32string_view s) { replace_s(bra, ket, s); }

void Env::insert(int c_bra, int c_ket, std::u32string_view s) {
  const int adjustment = replace_s(c_bra, c_ket, s);
  if (c_bra <= bra) bra += adjustment;
  if (c_bra <= ket) ket += adjustment;
}

}  // namespace palimpsest::snowball
