#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "curverat/counting.hpp"
#include "doctest.h"

using namespace curverat;

namespace {

CountReport count(const PlanarCurve& c, std::int64_t Q, const ApproximatingFunction& psi, Interval I,
                  bool dedupe = true, std::optional<std::int64_t> floor = std::nullopt) {
  NearCurveQuery q{c, Q, psi, I, floor, dedupe, true, 0};
  return enumerate_near_curve(q);
}

// circle oracle in exact integers: q^2 (q^2 - p1^2) against (p2 +- q tau')^2 needs tau rational; use tau = 1/64
std::int64_t circle_oracle(std::int64_t Q) {
  // |sqrt(q^2 - p1^2) - p2| < q/64  <=>  64 |sqrt(N) - p2| < q with N = q^2 - p1^2
  std::int64_t c = 0;
  for (std::int64_t q = 1; q <= Q; ++q) {
    for (std::int64_t p1 = 0; p1 <= q; ++p1) {
      std::int64_t N = q * q - p1 * p1;
      for (std::int64_t p2 = 0; p2 <= q + 1; ++p2) {
        // 64 sqrt(N) in (64 p2 - q, 64 p2 + q)
        std::int64_t lo = 64 * p2 - q, hi = 64 * p2 + q;
        bool above_lo = lo < 0 || 4096 * N > lo * lo;
        bool below_hi = 4096 * N < hi * hi;
        if (above_lo && below_hi && std::gcd(std::gcd(p1, p2), q) == 1) ++c;
      }
    }
  }
  return c;
}

}  // namespace

TEST_CASE("parabola baseline: three points at Q = 4") {
  auto rep = count(parabola(), 4, ApproximatingFunction::power(1.0), {0.0, 1.0});
  CHECK(rep.threshold == 1.0 / 16.0);
  REQUIRE(rep.count == 3);
  std::set<RationalPoint> pts(rep.points.begin(), rep.points.end());
  CHECK(pts.count({0, 0, 1}) == 1);
  CHECK(pts.count({1, 1, 1}) == 1);
  CHECK(pts.count({2, 1, 4}) == 1);
}

TEST_CASE("wide threshold accepts every p1") {
  // psi(Q)/Q > 1: for every p1/q in I some p2 lies within 1/2
  auto rep = count(parabola(), 12, ApproximatingFunction::constant(100.0), {0.0, 1.0}, false);
  std::int64_t pairs = 0;
  for (std::int64_t q = 1; q <= 12; ++q) pairs += q + 1;
  CHECK(rep.count >= pairs);
  auto one = count(parabola(), 1, ApproximatingFunction::power(2.0), {0.0, 1.0});
  CHECK(one.count >= 2);
}

TEST_CASE("circle against an integer oracle") {
  auto psi = ApproximatingFunction::constant(1.0 / 64.0);
  for (std::int64_t Q : {1, 5, 17, 40, 64}) {
    // threshold psi(Q)/Q is not what the oracle uses, so feed the per-q threshold through the scan
    auto res = scan_near_curve(unit_circle_upper(), {0.0, 1.0}, 1, Q, [](std::int64_t) { return 1.0 / 64.0; }, true,
                               false);
    CHECK(res.count == circle_oracle(Q));
    CHECK(res.uncertain == 0);
  }
  (void)psi;
}

TEST_CASE("property: monotone in I, psi and dedupe") {
  auto psi = ApproximatingFunction::power(0.75);
  for (std::int64_t Q : {1, 16, 100, 333}) {
    auto full = count(parabola(), Q, psi, {0.0, 1.0});
    auto half = count(parabola(), Q, psi, {0.0, 0.5});
    CHECK(half.count <= full.count);
    auto wider = count(parabola(), Q, psi.scaled(2.0), {0.0, 1.0});
    CHECK(full.count <= wider.count);
    auto triples = count(parabola(), Q, psi, {0.0, 1.0}, false);
    CHECK(triples.count >= full.count);
    if (Q == 1) CHECK(triples.count == full.count);
    CHECK(full.count == static_cast<std::int64_t>(full.points.size()));
    for (const auto& p : full.points) {
      CHECK(is_reduced(p));
      CHECK(exact_accept(parabola().exact(), p, full.threshold));
    }
    auto floored = count(parabola(), Q, psi, {0.0, 1.0}, true, Q / 2);
    for (const auto& p : floored.points) CHECK(p.q > Q / 2);
  }
}

TEST_CASE("ratio series on the parabola") {
  std::vector<std::int64_t> Qs;
  for (int k = 8; k <= 12; ++k) Qs.push_back(std::int64_t{1} << k);
  auto psi = ApproximatingFunction::power(0.75);
  auto s = theorem3_ratio_series(parabola(), psi, {0.0, 1.0}, Qs);
  CHECK(s.precondition.ok);
  for (const auto& p : s.points) CHECK(p.value >= 0.1);
  auto h = huxley_probe(parabola(), psi, {0.0, 1.0}, Qs);
  for (const auto& p : h.points) {
    REQUIRE(p.excess.has_value());
    CHECK(*p.excess <= 0.15);
  }
  auto halfI = theorem3_ratio_series(parabola(), psi, {0.0, 0.5}, Qs);
  for (std::size_t i = 0; i < Qs.size(); ++i) {
    CHECK(halfI.points[i].value <= 2.0 * s.points[i].value);
    CHECK(halfI.points[i].value >= 0.5 * s.points[i].value);
  }
  auto degenerate = huxley_probe(parabola(), psi, {0.0, 1.0}, {1});
  CHECK_FALSE(degenerate.points[0].excess.has_value());
  for (const auto& psi_bad : {ApproximatingFunction::power(1.0), ApproximatingFunction::constant(0.1)}) {
    auto bad = theorem3_ratio_series(parabola(), psi_bad, {0.0, 1.0}, {256, 512});
    CHECK_FALSE(bad.precondition.ok);
    CHECK(bad.points.size() == 2);
  }
}

TEST_CASE("multiplicative approximation") {
  auto r = is_multiplicatively_approximable_upto(1.0L / 3.0L, 1.0L / 7.0L, ApproximatingFunction::power(1.0), 21);
  REQUIRE(!r.witnesses.empty());
  CHECK(std::find(r.witnesses.begin(), r.witnesses.end(), 21) != r.witnesses.end());
  auto s = is_multiplicatively_approximable_upto(std::sqrt(2.0L) - 1, std::sqrt(3.0L) - 1,
                                                 ApproximatingFunction::power(0.5), 10000);
  CHECK(s.witness_count >= 1);
}
