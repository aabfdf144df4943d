#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "curverat/approx.hpp"

namespace curverat {

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct SieveOptions {
  bool with_divisors = false;
  std::uint64_t memory_budget = 3ull << 30;  // bytes
  std::uint64_t block = 1ull << 22;          // entries per work block
  int threads = 0;
  // Cache directory; empty means CURVE_RATIONALS_CACHE_DIR, and caching is off if that is unset too.
  std::string cache_dir;
  bool use_cache = true;
};

// r(n) (ordered signed pairs, r(0) = 1) and optionally d(n) on [0, N_max].
// r(n)/4 is stored in a byte, which is exact for n < 2^34.
class SieveTable {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  static SieveTable build(std::uint64_t n_max, const SieveOptions& opt = {});

  std::uint64_t n_max() const { return n_max_; }
  bool has_divisors() const { return !d_.empty(); }
  bool loaded_from_cache() const { return from_cache_; }
  const std::string& cache_path() const { return cache_path_; }

  std::int64_t r(std::uint64_t n) const {
    check(n);
    return n == 0 ? 1 : 4 * static_cast<std::int64_t>(r4_[n]);
  }
  std::uint32_t r_quarter(std::uint64_t n) const { return r4_[n]; }
  std::uint32_t d(std::uint64_t n) const;

  // sum of r(n) over lo <= n <= hi (n >= 1 part only; r(0) excluded)
  std::uint64_t range_sum_r(std::uint64_t lo, std::uint64_t hi) const;

  // prime factorization with exponents, ascending
  std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) const;
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  const std::vector<std::uint8_t>& r_quarter_data() const { return r4_; }
  const std::vector<std::uint16_t>& d_data() const { return d_; }

  // cache helpers, exposed for tests and the cli
  static std::string cache_file_name(std::uint64_t n_max, bool with_divisors);
  bool save(const std::string& path) const;
  static bool load(const std::string& path, std::uint64_t n_max, bool with_divisors, SieveTable& out);
  static std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull);

 private:
  void check(std::uint64_t n) const {
    if (n > n_max_) throw RangeError("sieve index " + std::to_string(n) + " beyond N_max=" + std::to_string(n_max_));
  }
  void finish_aux();

  std::uint64_t n_max_ = 0;
  std::vector<std::uint8_t> r4_;
  std::vector<std::uint16_t> d_;
  std::vector<std::uint32_t> spf_;     // only for n <= spf_.size()-1
  std::vector<std::uint32_t> primes_;  // primes up to sqrt(N_max)
  std::vector<std::uint64_t> block_prefix_;
  bool from_cache_ = false;
  std::string cache_path_;
};

// r(n) by direct pair enumeration; independent of the sieve.
std::int64_t r_bruteforce(std::uint64_t n);

struct GaussCount {
  std::uint64_t R = 0;   // sum_{1<=n<=x} r(n)
  double delta = 0.0;    // R - pi x
  double delta0 = 0.0;   // delta - r(x)/2 at integer x >= 1, else delta
};
GaussCount gauss_count(double x, const SieveTable& t);

struct NearSquareSumReport {
  double Q = 0.0;
  std::string psi;
  std::int64_t q_first = 0;
  std::int64_t q_last = 0;
  double exact_sum = 0.0;  // half-integers possible
  double main_term = 0.0;
  double ratio = 0.0;
  double suggested_N = 0.0;  // Q^2 / sum psi, recorded only
  std::int64_t tie_count = 0;
  std::int64_t tie_uncertain = 0;
  bool exact_ties = true;  // psi values are exact rationals, so ties are decided exactly
  std::vector<std::pair<std::int64_t, double>> per_q;
};

// sum over Q < q <= 2Q of sum r(n) over |q - sqrt n| <= psi(q), ties weighted 1/2.
NearSquareSumReport sum_r_near_squares(double Q, const ApproximatingFunction& psi, const SieveTable& t,
                                       bool keep_per_q = false);

// number of y in [0, m) with y^2 + h = 0 mod m
std::int64_t rho_congruence(std::uint64_t m, std::int64_t h, const SieveTable* t = nullptr);
std::int64_t rho_bruteforce(std::uint64_t m, std::int64_t h);

// the bound 2 d2 d(m/(d1 d2^2)) with gcd(m, h) = d1 d2^2, d1 squarefree
std::int64_t rho_bound(std::uint64_t m, std::int64_t h, const SieveTable& t);

std::uint64_t divisor_split(std::uint64_t n, const SieveTable& t);
std::uint32_t divisor_count(std::uint64_t n, const SieveTable& t);

struct SquareValueRow {
  std::int64_t M = 0;
  std::uint64_t sum_r_m2 = 0;     // sum_{m<=M} r(m^2)
  std::uint64_t sum_r_q2p1 = 0;   // sum_{q<=M} r(q^2+1)
  double ratio_m2 = 0.0;          // to (4/pi) M log M
  double ratio_q2p1 = 0.0;        // to (12/pi) M log M
};
// rows at dyadic checkpoints 2,4,8,... and at M itself
std::vector<SquareValueRow> square_value_asymptotics(std::int64_t M, const SieveTable& t);

}  // namespace curverat
