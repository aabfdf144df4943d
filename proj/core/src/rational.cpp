#include "curverat/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

namespace curverat {

namespace mp = boost::multiprecision;
using big = mp::cpp_int;

namespace {

big from_i128(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  big out = static_cast<std::uint64_t>(u >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(u);
  return neg ? big(-out) : out;
}

// x = m * 2^-e exactly, e >= 0 (shifts m left when the exponent is positive)
struct Dyadic {
  big m;
  int e = 0;
};

Dyadic to_dyadic(double x) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite value in exact comparison");
  Dyadic d;
  if (x == 0.0) return d;
  int exp = 0;
  double frac = std::frexp(x, &exp);  // x = frac * 2^exp, 0.5 <= |frac| < 1
  auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  int e = 53 - exp;
  d.m = mant;
  if (e < 0) {
    d.m <<= -e;
    e = 0;
  }
  d.e = e;
  return d;
}

int sgn(const big& v) { return v.sign(); }

}  // namespace

RationalPoint reduce(RationalPoint p) {
  if (p.q < 0) {
    p.q = -p.q;
    p.p1 = -p.p1;
    p.p2 = -p.p2;
  }
  if (p.q == 0) throw std::domain_error("zero denominator");
  std::int64_t g = gcd3(p.p1, p.p2, p.q);
  if (g > 1) {
    p.p1 /= g;
    p.p2 /= g;
    p.q /= g;
  }
  return p;
}

std::vector<Fraction> farey_window(long double a, long double b, std::int64_t qmax) {
  std::vector<Fraction> out;
  if (qmax < 1 || a > b) return out;
  // first fraction >= a: scan denominators for the smallest p/q >= a
  std::int64_t fl = static_cast<std::int64_t>(std::floor(a));
  Fraction best{fl + 1, 1};
  for (std::int64_t q = 1; q <= qmax; ++q) {
    auto p = static_cast<std::int64_t>(std::ceil(a * q));
    while (static_cast<long double>(p - 1) / q >= a) --p;
    while (static_cast<long double>(p) / q < a) ++p;
    if (static_cast<i128>(p) * best.q < static_cast<i128>(best.p) * q) best = {p, q};
  }
  std::int64_t g = std::gcd(best.p, best.q);
  best = {best.p / g, best.q / g};
  // predecessor in F_qmax gives the successor recurrence
  // find c/d preceding best: solve best.p*d - best.q*c = 1 with d maximal <= qmax
  std::int64_t c = 0, d = 0;
  {
    // extended Euclid for best.p * x - best.q * y = 1
    std::int64_t old_r = best.p, r = best.q, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
      std::int64_t qq = old_r / r;
      std::int64_t tmp = old_r - qq * r; old_r = r; r = tmp;
      tmp = old_s - qq * s; old_s = s; s = tmp;
      tmp = old_t - qq * t; old_t = t; t = tmp;
    }
    // best.p*old_s + best.q*old_t = 1  =>  d = old_s, c = -old_t
    d = old_s;
    c = -old_t;
    // shift to the largest d <= qmax
    std::int64_t k = (qmax - d) >= 0 ? (qmax - d) / best.q : -((d - qmax + best.q - 1) / best.q);
    d += k * best.q;
    c += k * best.p;
  }
  Fraction prev{c, d}, cur = best;
  while (cur.value() <= b) {
    out.push_back(cur);
    std::int64_t k = (qmax + prev.q) / cur.q;
    Fraction next{k * cur.p - prev.p, k * cur.q - prev.q};
    prev = cur;
    cur = next;
  }
  return out;
}

int sign_int_minus_scaled(i128 a, i128 b, double x) {
  Dyadic dx = to_dyadic(x);
  big lhs = from_i128(a) << dx.e;
  big rhs = from_i128(b) * dx.m;
  return sgn(big(lhs - rhs));
}

bool sqrt_within(i128 N, i128 p, i128 s, double x) {
  if (N < 0 || s < 0 || !(x > 0.0)) throw std::domain_error("sqrt_within precondition");
  Dyadic dx = to_dyadic(x);
  big W = from_i128(s) * dx.m;  // w = W * 2^-e
  big P = from_i128(p) << dx.e;
  big Nn = from_i128(N) << (2 * dx.e);
  // sqrt(N) < p + w
  big up = P + W;
  if (sgn(up) <= 0) return false;
  if (!(Nn < up * up)) return false;
  // p - w < sqrt(N)
  big lo = P - W;
  if (sgn(lo) < 0) return true;
  return lo * lo < Nn;
}

int sqrt_distance_sign(i128 N, i128 p, double x) {
  if (N < 0 || !(x > 0.0)) throw std::domain_error("sqrt_distance_sign precondition");
  Dyadic dx = to_dyadic(x);
  big P = from_i128(p) << dx.e;
  big Nn = from_i128(N) << (2 * dx.e);
  big up = P + dx.m;
  big lo = P - dx.m;
  // |sqrt N - p| <= x  iff  max(lo, 0) <= sqrt N <= up
  if (sgn(up) < 0) return 1;
  big up2 = up * up;
  if (Nn > up2) return 1;
  if (sgn(lo) > 0) {
    big lo2 = lo * lo;
    if (Nn < lo2) return 1;
    if (Nn == lo2) return 0;
  } else if (sgn(lo) == 0 && Nn == 0) {
    return 0;
  }
  return Nn == up2 ? 0 : -1;
}

SquareWindow square_window(std::int64_t q, double x) {
  if (!(x > 0.0)) throw std::domain_error("square_window needs x > 0");
  Dyadic dx = to_dyadic(x);
  big twoq = big(2 * q) << dx.e;
  big scale = big(1) << (2 * dx.e);
  SquareWindow w;
  {
    big t = dx.m * (twoq + dx.m);
    big fl = t / scale;
    w.up = static_cast<std::int64_t>(fl);
    w.up_tie = (fl * scale == t);
  }
  {
    big inner = twoq - dx.m;
    if (sgn(inner) <= 0) {
      // x >= 2q: every n >= 0 satisfies the lower side
      w.lo = q * q;
      return w;
    }
    big t = dx.m * inner;
    big fl = t / scale;
    w.lo = static_cast<std::int64_t>(fl);
    w.lo_tie = (fl * scale == t);
  }
  return w;
}

}  // namespace curverat
