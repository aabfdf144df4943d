#include <cmath>
#include <random>

#include "curverat/dimension.hpp"
#include "doctest.h"

using namespace curverat;

TEST_CASE("monomial series rule") {
  CHECK(monomial_series_converges(-1.2, 0.0));
  CHECK_FALSE(monomial_series_converges(-1.0, 0.0));
  CHECK_FALSE(monomial_series_converges(-1.0, -1.0));
  CHECK(monomial_series_converges(-1.0, -2.0));
  CHECK_FALSE(monomial_series_converges(-0.5, -5.0));
}

TEST_CASE("Khintchine hand values") {
  CHECK(classify_khintchine(ApproximatingFunction::power(0.5), 2).classification == Classification::Full);
  CHECK(classify_khintchine(ApproximatingFunction::power(0.6), 2).classification == Classification::Zero);
  CHECK(classify_khintchine(ApproximatingFunction::power_log(0.5, 1.0), 2).classification == Classification::Zero);
}

TEST_CASE("worked example on the curve") {
  const double v = 0.75, d = (2.0 - v) / (1.0 + v);
  auto psi = ApproximatingFunction::power_log(v, 1.0 / (d + 1.0));
  auto j = classify_jarnik(psi, d, JarnikVariant::Curve);
  CHECK(j.series == Classification::Diverges);
  REQUIRE(j.exponent_a.has_value());
  CHECK(*j.exponent_a == doctest::Approx(-1.0));
  CHECK(*j.exponent_b == doctest::Approx(-1.0));
  CHECK(limit_behaviour(psi, 2.0 - d, d + 1.0).kind == LimitKind::Zero);
}

TEST_CASE("property: Jarnik curve verdict flips at (2 - v)/(1 + v)") {
  for (double v : {0.55, 0.6, 0.75, 0.9}) {
    double d = (2.0 - v) / (1.0 + v);
    auto psi = ApproximatingFunction::power(v);
    CHECK(classify_jarnik(psi, d - 0.01, JarnikVariant::Curve).series == Classification::Diverges);
    CHECK(classify_jarnik(psi, d + 0.01, JarnikVariant::Curve).series == Classification::Converges);
  }
}

TEST_CASE("property: general classifier with r^s agrees with Jarnik") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> V(0.5, 0.95), S(0.55, 0.95);
  for (int i = 0; i < 20; ++i) {
    double v = V(rng), s = S(rng);
    auto psi = ApproximatingFunction::power(v);
    auto g = classify_general(psi, DimensionFunction::power(s));
    auto j = classify_jarnik(psi, s, JarnikVariant::Curve);
    CHECK(g.series == j.series);
  }
  auto g = classify_general(ApproximatingFunction::power(0.75), DimensionFunction::power(0.7));
  CHECK(g.series == Classification::Diverges);
}

TEST_CASE("dimension function checks") {
  auto ok = check_dimension_function(DimensionFunction::power(0.7));
  CHECK(ok.ratio_to_infinity);
  CHECK(ok.increasing_to_zero);
  auto rl = check_dimension_function(DimensionFunction::power_log(1.0, 1.0));
  CHECK(rl.below_half);
  CHECK(rl.ratio_to_infinity);
  CHECK(parse_dimension_function("powlog:0.5,2").k() == 2.0);
}

TEST_CASE("predicted dimension") {
  CHECK(predict_dimension_from_lambda(0.5).d == 1.0);
  CHECK(predict_dimension_from_lambda(0.75).d == 5.0 / 7.0);
  CHECK(predict_dimension(ApproximatingFunction::power(0.75)).lambda_exact);
  CHECK(predict_dimension_quadric(QuadricKind::UnitCircle, 1.5).d == doctest::Approx(0.4));
  CHECK(predict_dimension_quadric(QuadricKind::CircleRadiusSqrt3, 1.5).d == 0.0);
  double prev = 2.0;
  for (double l = 0.5; l < 1.0; l += 0.05) {
    double d = predict_dimension_from_lambda(l).d;
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("box dimension on the parabola") {
  auto rep = box_dimension_estimate(parabola(), ApproximatingFunction::power(0.75), {0.0, 1.0});
  CHECK(std::abs(rep.slope - 5.0 / 7.0) <= 0.15);
  CHECK(rep.levels.back().delta <= std::ldexp(1.0, -18));
  BoxDimensionOptions bo;
  for (int k = 8; k <= 15; ++k) bo.deltas.push_back(std::ldexp(1.0, -k));
  auto half = box_dimension_estimate(parabola(), ApproximatingFunction::power(0.5), {0.0, 1.0}, bo);
  CHECK(half.slope > 0.85);
  double prev = 2.0;
  for (double v : {0.55, 0.65, 0.75, 0.85}) {
    double s = box_dimension_estimate(parabola(), ApproximatingFunction::power(v), {0.0, 1.0}, bo).slope;
    CHECK(s <= prev + 1e-9);
    prev = s;
  }
  auto s3 = box_dimension_estimate(circle_sqrt3_upper(), ApproximatingFunction::power(1.5), {0.0, 1.5}, bo);
  CHECK(s3.slope < 1.0 / 2.5);
}
