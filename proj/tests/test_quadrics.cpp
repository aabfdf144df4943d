#include <cmath>
#include <numeric>
#include <set>

#include "curverat/quadrics.hpp"
#include "doctest.h"

using namespace curverat;

namespace {

QuadricFixture fixture(QuadricKind k) {
  QuadricFixture f;
  f.kind = k;
  return f;
}

const SieveTable& sieve() {
  static SieveTable t = SieveTable::build(static_cast<std::uint64_t>(8200) * 8200);
  return t;
}

}  // namespace

TEST_CASE("unit circle points at Qmax 5") {
  auto pts = exact_points(fixture(QuadricKind::UnitCircle), 5);
  std::set<RationalPoint> got(pts.begin(), pts.end());
  std::set<RationalPoint> want = {{1, 0, 1},  {-1, 0, 1}, {0, 1, 1},  {0, -1, 1},  {3, 4, 5},  {3, -4, 5},
                                  {-3, 4, 5}, {-3, -4, 5}, {4, 3, 5}, {4, -3, 5}, {-4, 3, 5}, {-4, -3, 5}};
  CHECK(got == want);
}

TEST_CASE("radius sqrt3 circle has no rational points") {
  for (std::int64_t Q : {1, 7, 50, 100}) CHECK(exact_points(fixture(QuadricKind::CircleRadiusSqrt3), Q).empty());
}

TEST_CASE("parabola points") {
  auto pts = exact_points(fixture(QuadricKind::Parabola), 4);
  std::set<RationalPoint> got(pts.begin(), pts.end());
  CHECK(got.count({2, 1, 4}) == 1);
  for (std::int64_t k = -2; k <= 2; ++k) CHECK(got.count({k, k * k, 1}) == 1);
  for (const auto& p : pts) CHECK(on_quadric(QuadricKind::Parabola, p));
}

TEST_CASE("property: circle counts match brute force for every Qmax <= 200") {
  std::vector<std::int64_t> per_q(201, 0);
  for (std::int64_t q = 1; q <= 200; ++q)
    for (std::int64_t s = -q; s <= q; ++s) {
      std::int64_t rest = q * q - s * s;
      auto t = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rest))));
      if (t * t != rest) continue;
      for (std::int64_t tt : {t, -t}) {
        if (tt == 0 && t != tt) continue;
        if (std::gcd(std::gcd(s, tt), q) == 1) ++per_q[static_cast<std::size_t>(q)];
        if (t == 0) break;
      }
    }
  std::int64_t cum = 0;
  for (std::int64_t Q = 1; Q <= 200; ++Q) {
    cum += per_q[static_cast<std::size_t>(Q)];
    auto pts = exact_points(fixture(QuadricKind::UnitCircle), Q);
    CHECK(static_cast<std::int64_t>(pts.size()) == cum);
    if (Q % 50 == 0)
      for (const auto& p : pts) {
        CHECK(on_quadric(QuadricKind::UnitCircle, p));
        CHECK(is_reduced(p));
      }
  }
}

TEST_CASE("hyperbola points match brute force") {
  const std::int64_t Q = 30;
  std::set<RationalPoint> want;
  for (std::int64_t q = 1; q <= Q; ++q)
    for (std::int64_t s = -(q * q + 1) / 2 - 1; s <= (q * q + 1) / 2 + 1; ++s) {
      std::int64_t rest = s * s - q * q;
      if (rest < 0) continue;
      auto t = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rest))));
      if (t * t != rest) continue;
      for (std::int64_t tt : {t, -t})
        if (std::gcd(std::gcd(s, tt), q) == 1) want.insert({s, tt, q});
    }
  auto pts = exact_points(fixture(QuadricKind::Hyperbola), Q);
  std::set<RationalPoint> got(pts.begin(), pts.end());
  CHECK(got == want);
  for (const auto& p : pts) CHECK(on_quadric(QuadricKind::Hyperbola, p));
}

TEST_CASE("transformed fixture") {
  auto f = fixture(QuadricKind::UnitCircle);
  f.transform = RationalAffine{{2, 0, 0, 1}, {1, 0}, 3};
  auto pts = exact_points(f, 5);
  CHECK(pts.size() == 12);
  std::set<RationalPoint> distinct(pts.begin(), pts.end());
  CHECK(distinct.size() == 12);
  CHECK(parse_quadric("hyperbola").kind == QuadricKind::Hyperbola);
  CHECK_THROWS_AS(parse_quadric("ellipse"), std::invalid_argument);
}

TEST_CASE("strict window sum against brute force") {
  const auto& t = sieve();
  for (std::int64_t c : {1, 10, 57, 300}) {
    for (double x : {0.25, 0.75, 1.5}) {
      auto w = strict_window_sum(c, x, t);
      auto k = static_cast<std::int64_t>(std::llround(4 * x));  // x = k/4
      std::int64_t strict = 0, ties = 0;
      for (std::int64_t n = 1; n <= (c + 2) * (c + 2); ++n) {
        std::int64_t lo = 4 * c - k, hi = 4 * c + k, n16 = 16 * n;
        bool above = lo < 0 || n16 > lo * lo;
        bool below = n16 < hi * hi;
        if (above && below) strict += t.r(static_cast<std::uint64_t>(n));
        else if ((lo >= 0 && n16 == lo * lo) || n16 == hi * hi) ties += t.r(static_cast<std::uint64_t>(n));
      }
      CHECK(w.strict == strict);
      CHECK(w.ties == ties);
    }
  }
}

TEST_CASE("W_m cross-checks") {
  const auto& t = sieve();
  auto circle = fixture(QuadricKind::UnitCircle);
  auto Psi = ApproximatingFunction::constant(0.3);
  auto w = build_Wm(circle, Psi, 5, t);
  auto s = sum_r_near_squares(32.0, Psi.scaled(4.0), t);
  CHECK(2.0 * s.exact_sum == 2.0 * static_cast<double>(w.inner_sum) + static_cast<double>(w.inner_ties));
  CHECK(w.condition_violations == 0);
  CHECK(w.squares > 0);

  auto tiny = build_Wm(circle, ApproximatingFunction::constant(1.0 / 2048.0), 6, t);
  std::int64_t want = 0;
  for (std::int64_t q = 65; q <= 128; ++q) want += t.r(static_cast<std::uint64_t>(q * q));
  CHECK(tiny.inner_sum == want);

  auto aux = ApproximatingFunction::power(0.6).auxiliary_half();
  WmOptions wo;
  wo.enumerate_squares = false;
  double lo = INFINITY, hi = 0.0;
  for (int m = 8; m <= 11; ++m) {
    auto r = build_Wm(circle, aux, m, t, wo);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  CHECK(hi / lo < 2.0);

  for (auto k : {QuadricKind::Hyperbola, QuadricKind::Parabola}) {
    auto r = build_Wm(fixture(k), ApproximatingFunction::power(0.6).auxiliary_half(), 3, t);
    CHECK(r.condition_violations == 0);
    CHECK(r.squares > 0);
  }
}

TEST_CASE("Borel-Cantelli tails") {
  auto circle = fixture(QuadricKind::UnitCircle);
  CHECK(borel_cantelli_tail(circle, ApproximatingFunction::power(0.6), std::nullopt, 1, 30).verdict.classification ==
        Classification::ZeroMeasure);
  CHECK(borel_cantelli_tail(circle, ApproximatingFunction::power(0.5), std::nullopt, 1, 30).verdict.classification ==
        Classification::Full);
  auto h = borel_cantelli_tail(circle, ApproximatingFunction::power(0.9), 0.8, 1, 30);
  CHECK(h.hausdorff);
  CHECK(h.verdict.classification == Classification::Zero);
  CHECK(h.rows.size() == 30);
  CHECK(h.rows[3].term == doctest::Approx(std::pow(2.0, -0.42 * 4)).epsilon(1e-9));
}
