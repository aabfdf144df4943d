#include <cmath>
#include <random>

#include "curverat/ubiquity.hpp"
#include "doctest.h"

using namespace curverat;

namespace {
UbiquityFunction constant_rho(double r) {
  return UbiquityFunction::custom([r](double) { return std::log(r); }, "const");
}
}  // namespace

TEST_CASE("coverage trivial cases") {
  auto sys = ResonantSystem::rationals({0.0, 1.0}, 16);
  CHECK(coverage_fraction(sys, constant_rho(2.0), 3, {0.0, 1.0}) == 1.0);
  ResonantSystem empty({}, {0.0, 1.0}, 1e9, "empty");
  CHECK(coverage_fraction(empty, constant_rho(0.1), 3, {0.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(coverage_fraction(sys, constant_rho(0.1), 10, {0.0, 1.0}), TruncationError);
}

TEST_CASE("parabola system covers at least half") {
  auto psi = ApproximatingFunction::power(0.75);
  auto cs = build_curve_system(parabola(), psi, 1024, {0.0, 1.0});
  auto rho = UbiquityFunction::corollary7(psi, UbiquityFunction::Growth::Log);
  CHECK(coverage_fraction(cs.system, rho, 10, {0.0, 1.0}) >= 0.5);
  auto series = coverage_series(cs.system, rho, 4, 10, {0.0, 1.0});
  CHECK(series.rows.size() == 7);
  CHECK(series.kappa_proxy >= 0.5);
  CHECK(rho.decreasing_on(Schedule{}, 1, 20));
}

TEST_CASE("curve systems at the edges") {
  auto one = build_curve_system(parabola(), ApproximatingFunction::power(0.75), 1, {0.0, 1.0});
  REQUIRE(one.system.size() == 2);
  CHECK(one.system.points()[0].x == 0.0L);
  CHECK(one.system.points()[1].x == 1.0L);
  CHECK(one.system.points()[0].beta == 1.0);
  auto s3 = build_curve_system(circle_sqrt3_upper(), ApproximatingFunction::power(0.75), 200, {0.0, 1.5});
  REQUIRE(s3.exact_on_curve.has_value());
  CHECK(*s3.exact_on_curve == 0);
}

TEST_CASE("property: coverage against a grid oracle and monotone in rho") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ResonantPoint> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({static_cast<long double>(U(rng)), 1.0});
    ResonantSystem sys(pts, {0.0, 1.0}, 1e6, "random");
    double r = 0.002 + 0.01 * U(rng);
    double got = coverage_fraction(sys, constant_rho(r), 2, {0.0, 1.0});
    const int n = 100000;
    int hit = 0;
    for (int i = 0; i < n; ++i) {
      double x = (i + 0.5) / n;
      for (const auto& p : pts)
        if (std::abs(x - static_cast<double>(p.x)) <= r) {
          ++hit;
          break;
        }
    }
    CHECK(std::abs(got - static_cast<double>(hit) / n) <= 2.0 * (1.0 / n) * 80);
    CHECK(coverage_fraction(sys, constant_rho(1.5 * r), 2, {0.0, 1.0}) >= got);
  }
}

TEST_CASE("theorem4 monotonicity and limits") {
  auto psi = ApproximatingFunction::power(0.75);
  double prev = -1.0;
  for (double C1 : {0.1, 0.3, 1.0, 3.0}) {
    auto r = theorem4_verify(parabola(), psi, 512, {0.0, 1.0}, C1, 0.01);
    CHECK(r.fraction >= prev);
    CHECK(r.radius == doctest::Approx(C1 / (512.0 * 512.0 * psi(512))));
    prev = r.fraction;
  }
  double last = 2.0;
  for (double d0 : {0.01, 0.2, 0.5, 0.9}) {
    auto r = theorem4_verify(parabola(), psi, 512, {0.0, 1.0}, 1.0, d0);
    CHECK(r.fraction <= last);
    last = r.fraction;
  }
  CHECK(theorem4_verify(parabola(), psi, 512, {0.0, 1.0}, 1e9, 0.01).fraction == 1.0);
  CHECK(theorem4_verify(parabola(), psi, 512, {0.0, 1.0}, 1e-12, 0.01).fraction < 1e-6);
  auto b = theorem4_bisect_c1(parabola(), psi, 512, {0.0, 1.0}, 0.01);
  REQUIRE(b.C1_star.has_value());
  CHECK(b.fraction >= 0.5);
  CHECK(theorem4_verify(parabola(), psi, 512, {0.0, 1.0}, *b.C1_star * 0.99, 0.01).fraction < 0.5);
}

TEST_CASE("BIKT measure") {
  auto g = dual_pair(parabola());
  CHECK(g.g1(0.5) == doctest::Approx(0.25));  // x f' - f = x^2
  CHECK(g.g2(0.5) == doctest::Approx(-1.0));
  auto full = measure_BIKT(g, {0.0, 1.0}, 1.0, 1.0, 1.0, 2000);
  CHECK(full.estimate <= 1.0);
  double prev = 2.0;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    auto r = measure_BIKT(g, {0.0, 1.0}, d, 1.0, 1.0, 4000);
    CHECK(r.estimate <= prev);
    CHECK(r.ratio <= 2.0);
    prev = r.estimate;
  }
  auto base = measure_BIKT(g, {0.0, 1.0}, 0.01, 1.0, 1.0, 4000);
  CHECK(measure_BIKT(g, {0.0, 1.0}, 0.01, 2.0, 1.0, 4000).estimate >= base.estimate);
  CHECK(measure_BIKT(g, {0.0, 1.0}, 0.01, 1.0, 4.0, 4000).estimate >= base.estimate);
  CHECK_THROWS_AS(measure_BIKT(g, {0.0, 1.0}, 0.5, 4.0, 1.0, 4000), DomainError);
  CHECK_THROWS_AS(measure_BIKT(g, {0.0, 1.0}, 0.01, 1.0, 1.0, 10), DomainError);
}

TEST_CASE("ubiquity function grammar") {
  auto psi = ApproximatingFunction::power(0.75);
  for (const char* s : {"cor7:log2p", "cor7:loglog", "cor7:log", "cor7:staircase", "pow:1.5", "pow:2,3"}) {
    auto f = parse_ubiquity_function(s, psi);
    CHECK(f(1000.0) > 0.0);
    CHECK(f(1e6) < f(1e3));
  }
  CHECK(parse_ubiquity_function("pow:2,3", psi)(10.0) == doctest::Approx(0.03));
  CHECK_THROWS(parse_ubiquity_function("cor7:nope", psi));
}
