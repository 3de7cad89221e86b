#pragma once

#include <cstdint>
#include <cmath>
#include <compare>
#include <functional>
#include <stdexcept>
#include <string>

namespace afem {

/// Exact dyadic rational num / 2^exp, normalized so that num is odd or zero.
///
/// All mesh coordinates are dyadic: midpoints of dyadic points are dyadic,
/// so newest-vertex bisection never leaves this set. Comparisons, midpoints
/// and collinearity tests are exact; conversion to double happens only at
/// FEM assembly time.
struct Dyadic {
  std::int64_t num = 0;
  std::int32_t exp = 0;  // denominator exponent, >= 0

  constexpr Dyadic() = default;
  constexpr Dyadic(std::int64_t n, std::int32_t e) : num(n), exp(e) { normalize(); }
  constexpr explicit Dyadic(std::int64_t n) : num(n), exp(0) {}

  constexpr void normalize() {
    if (num == 0) {
      exp = 0;
      return;
    }
    while (exp > 0 && (num & 1) == 0) {
      num >>= 1;
      --exp;
    }
  }

  double to_double() const { return std::ldexp(static_cast<double>(num), -exp); }

  friend constexpr bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.num == b.num && a.exp == b.exp;
  }

  friend constexpr std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    // Compare a.num * 2^(b.exp) with b.num * 2^(a.exp) on a common scale.
    const __int128 lhs = static_cast<__int128>(a.num) << b.exp;
    const __int128 rhs = static_cast<__int128>(b.num) << a.exp;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const {
    if (exp == 0) return std::to_string(num);
    return std::to_string(num) + "/2^" + std::to_string(exp);
  }
};

inline Dyadic midpoint(const Dyadic& a, const Dyadic& b) {
  const std::int32_t e = std::max(a.exp, b.exp) + 1;
  if (e >= 62) throw std::overflow_error("dyadic midpoint: exponent too large");
  const std::int64_t an = a.num << (e - 1 - a.exp);
  const std::int64_t bn = b.num << (e - 1 - b.exp);
  return Dyadic(an + bn, e);
}

/// 2D point with exact dyadic coordinates.
struct Point {
  Dyadic x, y;

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr std::strong_ordering operator<=>(const Point& a, const Point& b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
  double xd() const { return x.to_double(); }
  double yd() const { return y.to_double(); }
};

inline Point midpoint(const Point& a, const Point& b) {
  return Point{midpoint(a.x, b.x), midpoint(a.y, b.y)};
}

/// Exact sign of the cross product (b - a) x (c - a): +1 counterclockwise,
/// -1 clockwise, 0 collinear.
int orient2d(const Point& a, const Point& b, const Point& c);

/// Exact test: p lies on the closed segment [a, b].
bool on_segment(const Point& p, const Point& a, const Point& b);

/// Exact test: p lies inside or on the boundary of triangle (a, b, c).
bool in_triangle(const Point& p, const Point& a, const Point& b, const Point& c);

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(p.x.num));
    mix(static_cast<std::uint64_t>(p.x.exp));
    mix(static_cast<std::uint64_t>(p.y.num));
    mix(static_cast<std::uint64_t>(p.y.exp));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace afem
