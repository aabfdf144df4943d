#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "curverat/curve.hpp"
#include "doctest.h"

using namespace curverat;

TEST_CASE("fixture values and curvature bounds") {
  auto p = parabola();
  CHECK(p.f(0.5) == 0.25);
  CHECK(p.df(0.5) == 1.0);
  CHECK(p.d2f(0.3) == 2.0);
  CHECK_FALSE(check_curvature_bounds(p).has_value());
  auto c = unit_circle_upper();
  CHECK(c.f(0.6) == doctest::Approx(0.8));
  CHECK_FALSE(check_curvature_bounds(c).has_value());
  CHECK(hyperbola_upper().f(0.75) == doctest::Approx(1.25));
  CHECK(circle_sqrt3_upper().f(1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(parse_curve("circle").id() == c.id());
  CHECK_THROWS_AS(parse_curve("ellipse"), std::invalid_argument);
}

TEST_CASE("Cantor fixture is flat on the Cantor set and positive on gaps") {
  const int D = 4;
  auto k = cantor_curve(D);
  auto ends = cantor_endpoints(D);
  CHECK(ends.size() == 32);
  for (double x : ends) {
    CHECK(k.f(x) == 0.0);
    CHECK(k.df(x) == 0.0);
    CHECK(k.d2f(x) == 0.0);
  }
  for (const auto& g : cantor_gaps(D)) {
    // the bump underflows double at this depth; log_f keeps it visible
    CHECK(k.f(0.5 * (g.a + g.b)) >= 0.0);
    CHECK(std::isfinite(k.log_f(0.5 * (g.a + g.b))));
  }
  auto k1 = cantor_curve(1);
  CHECK(k1.f(0.5) > 0.0);
}

TEST_CASE("curve from a sampled file") {
  auto path = (std::filesystem::temp_directory_path() / "curverat-test-curve.csv").string();
  {
    std::ofstream f(path);
    f << "x,f,df,d2f\n";
    for (int i = 0; i <= 100; ++i) {
      double x = i / 100.0;
      f << x << "," << x * x << "," << 2 * x << ",2\n";
    }
  }
  auto c = parse_curve("file:" + path);
  CHECK(c.f(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c.f(0.505) == doctest::Approx(0.255025).epsilon(1e-4));
  CHECK(c.d2f(0.3) == 2.0);
  std::remove(path.c_str());
  CHECK_THROWS(parse_curve("file:/nonexistent/curve.csv"));
}
