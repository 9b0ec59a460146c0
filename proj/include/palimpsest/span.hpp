#pragma once

#include <algorithm>
#include <cstddef>
#include <compare>

namespace palimpsest {

// Half-open range [start, end) of scalar code point offsets into a
// normalized document text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end > start ? end - start : 0; }
  bool empty() const noexcept { return end <= start; }
  bool contains(const Span& other) const noexcept {
    return other.start >= start && other.end <= end;
  }

  friend auto operator<=>(const Span&, const Span&) = default;
};

inline std::size_t overlap_length(const Span& x, const Span& y) noexcept {
  std::size_t lo = std::max(x.start, y.start);
  std::size_t hi = std::min(x.end, y.end);
  return hi > lo ? hi - lo : 0;
}

// Distance between two spans on one axis; 0 when they overlap or touch.
inline std::size_t gap_between(const Span& x, const Span& y) noexcept {
  if (y.start >= x.end) return y.start - x.end;
  if (x.start >= y.end) return x.start - y.end;
  return 0;
}

inline Span hull(const Span& x, const Span& y) noexcept {
  return {std::min(x.start, y.start), std::max(x.end, y.end)};
}

}  // namespace palimpsest
