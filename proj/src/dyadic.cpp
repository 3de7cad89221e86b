#include "afem/dyadic.hpp"

#include <algorithm>

namespace afem {

namespace {

// Scales three dyadics to their common (maximal) exponent and returns the
// integer numerators. Exponents stay below 62, so differences fit and
// products of two scaled differences fit in __int128.
struct Scaled3 {
  __int128 a, b, c;
};

Scaled3 common_scale(const Dyadic& a, const Dyadic& b, const Dyadic& c) {
  const std::int32_t e = std::max({a.exp, b.exp, c.exp});
  return Scaled3{static_cast<__int128>(a.num) << (e - a.exp),
                 static_cast<__int128>(b.num) << (e - b.exp),
                 static_cast<__int128>(c.num) << (e - c.exp)};
}

}  // namespace

int orient2d(const Point& a, const Point& b, const Point& c) {
  const auto [ax, bx, cx] = common_scale(a.x, b.x, c.x);
  const auto [ay, by, cy] = common_scale(a.y, b.y, c.y);
  // All x numerators share one scale and all y numerators another, so both
  // products below carry the same total scale and the sign is exact.
  const __int128 det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return det > 0 ? 1 : det < 0 ? -1 : 0;
}

bool on_segment(const Point& p, const Point& a, const Point& b) {
  if (orient2d(a, b, p) != 0) return false;
  const bool x_in = (a.x <= p.x && p.x <= b.x) || (b.x <= p.x && p.x <= a.x);
  const bool y_in = (a.y <= p.y && p.y <= b.y) || (b.y <= p.y && p.y <= a.y);
  return x_in && y_in;
}

bool in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  const int o = orient2d(a, b, c);
  if (o == 0) return false;
  const int s1 = orient2d(a, b, p);
  const int s2 = orient2d(b, c, p);
  const int s3 = orient2d(c, a, p);
  if (o > 0) return s1 >= 0 && s2 >= 0 && s3 >= 0;
  return s1 <= 0 && s2 <= 0 && s3 <= 0;
}

}  // namespace afem
