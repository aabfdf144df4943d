#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace curverat {

using i128 = __int128;

// (p1/q, p2/q) with gcd(p1, p2, q) = 1 once reduced.
struct RationalPoint {
  std::int64_t p1 = 0;
  std::int64_t p2 = 0;
  std::int64_t q = 1;

  double x() const { return static_cast<double>(p1) / static_cast<double>(q); }
  double y() const { return static_cast<double>(p2) / static_cast<double>(q); }
  bool operator==(const RationalPoint&) const = default;
  auto operator<=>(const RationalPoint&) const = default;
};

inline std::int64_t gcd3(std::int64_t a, std::int64_t b, std::int64_t c) {
  return std::gcd(std::gcd(a, b), c);
}

inline bool is_reduced(const RationalPoint& p) { return p.q >= 1 && gcd3(p.p1, p.p2, p.q) == 1; }

RationalPoint reduce(RationalPoint p);

// All reduced fractions p/q in [a, b] with 1 <= q <= qmax, increasing order (Farey successor walk).
struct Fraction {
  std::int64_t p = 0;
  std::int64_t q = 1;
  long double value() const { return static_cast<long double>(p) / static_cast<long double>(q); }
};
std::vector<Fraction> farey_window(long double a, long double b, std::int64_t qmax);

// Exact decisions with a double x read as the dyadic rational it stores.

// sign(a - b*x)
int sign_int_minus_scaled(i128 a, i128 b, double x);

// |sqrt(N) - p| < s*x, decided exactly (N >= 0, s >= 0, x > 0).
bool sqrt_within(i128 N, i128 p, i128 s, double x);

// sign(|sqrt(N) - p| - x), exact (N >= 0, x > 0).
int sqrt_distance_sign(i128 N, i128 p, double x);

// For n = q^2 + k (k >= 0):  sqrt(n) <= q + x  iff  k <= x(2q + x).
// For n = q^2 - k (k > 0):   sqrt(n) >= q - x  iff  k <= x(2q - x).
// up/lo are the floors, *_tie marks that the floor is attained with equality.
struct SquareWindow {
  std::int64_t up = 0;
  bool up_tie = false;
  std::int64_t lo = 0;
  bool lo_tie = false;
};
SquareWindow square_window(std::int64_t q, double x);

}  // namespace curverat
