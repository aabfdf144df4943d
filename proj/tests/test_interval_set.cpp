#include <cmath>
#include <random>

#include "curverat/interval_set.hpp"
#include "doctest.h"

using namespace curverat;

TEST_CASE("union measure hand values") {
  CHECK(union_measure(IntervalSet({{0.0, 0.5}, {0.25, 1.0}}), {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(union_measure(IntervalSet(), {0.0, 1.0}) == 0.0);
  CHECK(union_measure(IntervalSet({{-1.0, 0.25}, {0.75, 2.0}}), {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
}

namespace {
double grid_measure(const std::vector<Interval>& ivs, Interval clip, int n) {
  int hit = 0;
  for (int i = 0; i < n; ++i) {
    double x = clip.a + (i + 0.5) * clip.length() / n;
    for (const auto& iv : ivs)
      if (iv.contains(x)) {
        ++hit;
        break;
      }
  }
  return clip.length() * hit / n;
}
}  // namespace

TEST_CASE("property: union measure against a grid oracle, monotone and subadditive") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.2, 1.2), w(0.0, 0.1);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Interval> A, B;
    for (int i = 0; i < 12; ++i) {
      double c = u(rng);
      A.push_back({c, c + w(rng)});
      c = u(rng);
      B.push_back({c, c + w(rng)});
    }
    Interval clip{0.0, 1.0};
    IntervalSet sa(A), sb(B), su(A);
    su.unite(sb);
    const int n = 200000;
    CHECK(std::abs(union_measure(sa, clip) - grid_measure(A, clip, n)) <= 2.0 * 24.0 / n);
    double ma = union_measure(sa, clip), mb = union_measure(sb, clip), mu = union_measure(su, clip);
    CHECK(mu >= ma - 1e-12);
    CHECK(mu <= ma + mb + 1e-12);
    double inter = union_measure(sa.intersect(sb), clip);
    CHECK(mu == doctest::Approx(ma + mb - inter).epsilon(1e-9));
    std::vector<double> centers;
    std::vector<Interval> balls;
    for (int i = 0; i < 30; ++i) {
      centers.push_back(u(rng));
      balls.push_back({centers.back() - 0.01, centers.back() + 0.01});
    }
    CHECK(balls_union_measure(centers, 0.01, clip) == doctest::Approx(union_measure(IntervalSet(balls), clip)).epsilon(1e-12));
  }
}

TEST_CASE("touching intervals merge") {
  IntervalSet s({{0.0, 0.5}, {0.5, 1.0}});
  CHECK(s.pieces().size() == 1);
  CHECK(s.contains(0.5));
  CHECK_FALSE(s.contains(1.5));
}
