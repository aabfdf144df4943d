#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "curverat/sieve.hpp"
#include "doctest.h"

using namespace curverat;

namespace {

std::int64_t pairs(std::int64_t n) {
  std::int64_t c = 0;
  for (std::int64_t a = -400; a <= 400; ++a)
    for (std::int64_t b = -400; b <= 400; ++b) c += a * a + b * b == n;
  return c;
}

const SieveTable& small() {
  static SieveTable t = [] {
    SieveOptions so;
    so.with_divisors = true;
    so.use_cache = false;
    return SieveTable::build(200000, so);
  }();
  return t;
}

}  // namespace

TEST_CASE("r(n) hand values") {
  const auto& t = small();
  CHECK(t.r(0) == 1);
  CHECK(t.r(1) == 4);
  CHECK(t.r(3) == 0);
  CHECK(t.r(25) == 12);
  CHECK(t.r(25) == pairs(25));
  CHECK(t.r(65) == pairs(65));
  CHECK_THROWS_AS(t.r(200001), RangeError);
}

TEST_CASE("property: r(n) structure and d(n)") {
  const auto& t = small();
  for (std::uint64_t n = 1; n <= 20000; ++n) {
    CHECK(t.r(n) % 4 == 0);
    CHECK(t.r(n) == r_bruteforce(n));
    std::uint32_t d = 0;
    for (std::uint64_t k = 1; k * k <= n; ++k)
      if (n % k == 0) d += k * k == n ? 1 : 2;
    CHECK(t.d(n) == d);
  }
  for (std::uint64_t p : {3ull, 7ull, 11ull, 19ull})
    for (std::uint64_t m : {1ull, 2ull, 5ull, 9ull}) CHECK(t.r(p * m * m) == 0);
}

TEST_CASE("Gauss circle counts") {
  const auto& t = small();
  auto g = gauss_count(100.0, t);
  CHECK(g.R == 316);
  CHECK(g.delta == doctest::Approx(316.0 - 100.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(g.delta == doctest::Approx(1.841).epsilon(1e-3));
  CHECK(gauss_count(1.0, t).R == 4);
  auto h = gauss_count(0.5, t);
  CHECK(h.R == 0);
  CHECK(h.delta0 == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("near-squares sum against a direct lattice count") {
  const auto& t = small();
  // psi = 1/4 is dyadic: |q - sqrt(n)| <= 1/4 iff (4q-1)^2 <= 16 n <= (4q+1)^2, ties weighted 1/2
  const std::int64_t Q = 100;
  double want = 0.0;
  for (std::int64_t q = Q + 1; q <= 2 * Q; ++q) {
    for (std::int64_t a = -2 * Q - 2; a <= 2 * Q + 2; ++a) {
      for (std::int64_t b = -2 * Q - 2; b <= 2 * Q + 2; ++b) {
        std::int64_t n16 = 16 * (a * a + b * b);
        std::int64_t lo = (4 * q - 1) * (4 * q - 1), hi = (4 * q + 1) * (4 * q + 1);
        if (n16 > lo && n16 < hi) want += 1.0;
        else if (n16 == lo || n16 == hi) want += 0.5;
      }
    }
  }
  auto rep = sum_r_near_squares(static_cast<double>(Q), ApproximatingFunction::constant(0.25), t, true);
  CHECK(rep.exact_sum == want);
  double main = 0.0;
  for (std::int64_t q = Q + 1; q <= 2 * Q; ++q) main += 4.0 * std::numbers::pi * q * 0.25;
  CHECK(rep.main_term == doctest::Approx(main).epsilon(1e-12));
  CHECK(rep.per_q.size() == static_cast<std::size_t>(Q));
}

TEST_CASE("near-squares sum: tiny windows see only n = q^2, doubling psi never decreases") {
  const auto& t = small();
  const double Q = 150;
  auto tiny = sum_r_near_squares(Q, ApproximatingFunction::constant(1.0 / 4096.0), t);
  double want = 0.0;
  for (std::int64_t q = 151; q <= 300; ++q) want += static_cast<double>(t.r(static_cast<std::uint64_t>(q * q)));
  CHECK(tiny.exact_sum == want);
  for (double v : {0.3, 0.5, 0.8}) {
    auto psi = ApproximatingFunction::power(v);
    CHECK(sum_r_near_squares(Q, psi.scaled(2.0), t).exact_sum >= sum_r_near_squares(Q, psi, t).exact_sum);
  }
  auto big = sum_r_near_squares(1000.0, ApproximatingFunction::constant(0.25), SieveTable::build(2003ull * 2003ull));
  CHECK(big.main_term == doctest::Approx(std::numbers::pi * 1500500.0).epsilon(1e-12));
  CHECK(big.ratio >= 0.97);
  CHECK(big.ratio <= 1.03);
}

TEST_CASE("rho hand values and histogram property") {
  const auto& t = small();
  CHECK(rho_congruence(5, 1, &t) == 2);
  CHECK(rho_congruence(4, 1, &t) == 0);
  CHECK(rho_congruence(1, 17, &t) == 1);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::int64_t> M(1, 3000), H(-5000, 5000);
  for (int i = 0; i < 3000; ++i) {
    auto m = static_cast<std::uint64_t>(M(rng));
    std::int64_t h = H(rng);
    auto r = rho_congruence(m, h, &t);
    CHECK(r == rho_bruteforce(m, h));
    CHECK(r == rho_congruence(m, h));
    CHECK(r <= rho_bound(m, h, t));
  }
}

TEST_CASE("divisor split") {
  const auto& t = small();
  CHECK(divisor_split(97, t) == 1);
  auto m36 = divisor_split(36, t);
  CHECK(36 % m36 == 0);
  CHECK(m36 <= 6);
  CHECK(9 <= std::pow(divisor_count(m36, t), 3));
  CHECK(divisor_split(1024, t) == 32);
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    auto m = divisor_split(n, t);
    CHECK(n % m == 0);
    CHECK(m * m <= n);
    CHECK(divisor_count(n, t) <= std::max<std::uint64_t>(2, std::pow(divisor_count(m, t), 3)));
  }
}

TEST_CASE("square value sums") {
  auto t = SieveTable::build(1000ull * 1000ull + 2);
  auto rows = square_value_asymptotics(1000, t);
  REQUIRE(!rows.empty());
  CHECK(rows.front().M == 2);
  CHECK(rows.front().sum_r_m2 == 8);  // r(1) + r(4)
  CHECK(rows.front().sum_r_q2p1 == 12);  // r(2) + r(5)
  CHECK(rows.back().M == 1000);
  // r(m^2) = 4 prod_{p = 1 mod 4} (2e + 1)
  std::uint64_t want = 0;
  for (std::uint64_t m = 1; m <= 1000; ++m) {
    std::uint64_t v = 4, n = m;
    for (std::uint64_t p = 2; p * p <= n || n > 1; ++p) {
      if (p * p > n) p = n;
      int e = 0;
      while (n % p == 0) n /= p, ++e;
      if (p % 4 == 1) v *= 2 * e + 1;
    }
    want += v;
  }
  CHECK(rows.back().sum_r_m2 == want);
  CHECK(rows.back().ratio_m2 > 0.5);
  CHECK(rows.back().ratio_m2 < 2.0);
}

TEST_CASE("cache round trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "curverat-test-cache";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SieveOptions so;
  so.cache_dir = dir.string();
  so.with_divisors = true;
  auto a = SieveTable::build(50000, so);
  CHECK_FALSE(a.loaded_from_cache());
  auto b = SieveTable::build(50000, so);
  CHECK(b.loaded_from_cache());
  CHECK(a.r_quarter_data() == b.r_quarter_data());
  CHECK(a.d_data() == b.d_data());
  // a different bound never reuses the file
  auto c = SieveTable::build(50001, so);
  CHECK_FALSE(c.loaded_from_cache());
  // corrupt payload is rejected
  std::string path = (dir / SieveTable::cache_file_name(50000, true)).string();
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    REQUIRE(f);
    std::fseek(f, 100, SEEK_SET);
    std::fputc(0x7f, f);
    std::fclose(f);
  }
  SieveTable d;
  CHECK_FALSE(SieveTable::load(path, 50000, true, d));
  fs::remove_all(dir);
}
