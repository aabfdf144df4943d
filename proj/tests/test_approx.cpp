#include <cmath>
#include <random>

#include "curverat/approx.hpp"
#include "doctest.h"

using namespace curverat;

TEST_CASE("psi evaluation at hand values") {
  CHECK(ApproximatingFunction::power(0.5)(4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ApproximatingFunction::power(1.0)(7) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  CHECK(ApproximatingFunction::constant(0.25)(1000) == 0.25);
  auto pl = ApproximatingFunction::power_log(0.75, 1.0 / (1.0 + 5.0 / 7.0));
  double h = 1000.0;
  CHECK(pl(1000) == doctest::Approx(std::pow(h, -0.75) * std::pow(std::log(h), -1.0 / (1.0 + 5.0 / 7.0))));
}

TEST_CASE("lower order") {
  CHECK(lower_order(ApproximatingFunction::power(0.75)) == doctest::Approx(0.75));
  CHECK(lower_order(ApproximatingFunction::power_log(0.6, 2.0)) == doctest::Approx(0.6));
  CHECK(lower_order(ApproximatingFunction::constant(3.0)) == doctest::Approx(0.0));
  auto t = ApproximatingFunction::table({1.0, 0.5, 0.25, 0.125});
  CHECK(std::isfinite(lower_order(t, 1 << 10)));
}

TEST_CASE("grammar round trip") {
  for (const char* s : {"pow:0.75", "const:0.25", "powlog:0.6,2"}) {
    auto psi = parse_psi(s);
    auto again = parse_psi(psi.describe());
    for (std::int64_t h : {1, 2, 10, 1000, 123456}) CHECK(psi(h) == again(h));
  }
  CHECK_THROWS_AS(parse_psi("nope:1"), std::invalid_argument);
  CHECK_THROWS(parse_psi("pow:"));
}

TEST_CASE("derived functions") {
  auto psi = ApproximatingFunction::power(0.6);
  auto aux = psi.auxiliary_half();
  for (std::int64_t h : {3, 10, 100, 10000, 1000000}) {
    double other = std::pow(static_cast<double>(h), -0.5) / std::log(static_cast<double>(h));
    CHECK(aux(h) == doctest::Approx(std::max(psi(h), other)).epsilon(1e-12));
    CHECK(psi.phi()(h) == doctest::Approx(psi(h) / static_cast<double>(h)).epsilon(1e-12));
    CHECK(psi.scaled(4.0)(h) == doctest::Approx(4.0 * psi(h)).epsilon(1e-15));
  }
  CHECK(psi.at_real(10.2) == psi(11));
}

TEST_CASE("property: every factory is non-increasing") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(0.0, 2.0), a(-2.0, 3.0), c(0.01, 10.0);
  for (int i = 0; i < 40; ++i) {
    std::vector<ApproximatingFunction> fs = {ApproximatingFunction::power(v(rng), c(rng)),
                                             ApproximatingFunction::power_log(v(rng) + 0.05, a(rng)),
                                             ApproximatingFunction::power(v(rng)).auxiliary_half(),
                                             ApproximatingFunction::power(v(rng)).phi()};
    for (const auto& f : fs) CHECK(first_monotonicity_violation(f, 20000) == 0);
  }
  std::vector<double> vals;
  double x = 1.0;
  for (int i = 0; i < 50; ++i) vals.push_back(x *= 0.9);
  auto t = ApproximatingFunction::table(vals);
  CHECK(first_monotonicity_violation(t, 1000) == 0);
  CHECK(t.in_table_tail(100));
  CHECK(t(100) == vals.back());
}
