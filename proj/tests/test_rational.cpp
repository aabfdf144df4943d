#include <numeric>
#include <random>
#include <set>

#include "curverat/cantor.hpp"
#include "curverat/rational.hpp"
#include "doctest.h"

using namespace curverat;

TEST_CASE("farey window matches brute force") {
  for (std::int64_t N : {1, 2, 5, 17, 40}) {
    auto got = farey_window(0.25L, 0.75L, N);
    std::set<std::pair<std::int64_t, std::int64_t>> want;
    for (std::int64_t q = 1; q <= N; ++q)
      for (std::int64_t p = 0; p <= q; ++p)
        if (std::gcd(p, q) == 1 && 4 * p >= q && 4 * p <= 3 * q) want.emplace(p, q);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i + 1 < got.size(); ++i) CHECK(got[i].p * got[i + 1].q < got[i + 1].p * got[i].q);
    for (const auto& f : got) CHECK(want.count({f.p, f.q}) == 1);
  }
}

TEST_CASE("property: smallest fraction at least x") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> Nd(1, 300);
  for (int i = 0; i < 1500; ++i) {
    long double x = U(rng);
    std::int64_t N = Nd(rng);
    std::int64_t bp = 1, bq = 0;  // +infinity
    for (std::int64_t q = 1; q <= N; ++q) {
      auto p = static_cast<std::int64_t>(std::ceil(x * q));
      while (static_cast<long double>(p - 1) >= x * q) --p;
      while (static_cast<long double>(p) < x * q) ++p;
      if (bq == 0 || p * bq < bp * q) bp = p, bq = q;
    }
    auto f = smallest_fraction_at_least(x, N);
    REQUIRE(f.has_value());
    CHECK(f->p * bq == bp * f->q);
  }
}

TEST_CASE("exact decisions on dyadic inputs") {
  CHECK(sign_int_minus_scaled(1, 4, 0.25) == 0);
  CHECK(sign_int_minus_scaled(2, 4, 0.25) == 1);
  CHECK(sqrt_distance_sign(25, 4, 1.0) == 0);
  CHECK(sqrt_distance_sign(26, 4, 1.0) == 1);
  CHECK(sqrt_distance_sign(24, 4, 1.0) == -1);
  CHECK(sqrt_within(16, 4, 1, 0.5));
  auto w = square_window(10, 0.5);  // sqrt n <= 10.5 iff n <= 110.25
  CHECK(w.up == 10);
  CHECK_FALSE(w.up_tie);
  CHECK(reduce({2, 4, 6}) == RationalPoint{1, 2, 3});
  CHECK(is_reduced({1, 2, 3}));
}
