#include "curverat/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "curverat/parallel.hpp"

namespace curverat {

namespace {

constexpr std::uint64_t kTile = 1u << 16;
constexpr std::uint64_t kPrefixStride = 4096;
constexpr std::uint64_t kSpfCap = 1u << 22;
constexpr std::uint64_t kMaxN = 1ull << 34;

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::uint32_t> small_primes(std::uint64_t limit) {
  std::vector<char> comp(limit + 1, 0);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (comp[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = 1;
  }
  return out;
}

template <class U>
U odd_inverse(U p) {
  U x = p;  // correct to 3 bits
  for (int i = 0; i < 6; ++i) x *= U(2) - p * x;
  return x;
}

template <class U>
struct Scratch {
  std::vector<U> rem;
  std::vector<std::uint8_t> acc;
  std::vector<std::uint8_t> odd;  // some p = 3 mod 4 to an odd power
  std::vector<std::uint8_t> par;  // exponent parity of the prime being swept
  std::vector<std::uint16_t> dd;
};

// r(n)/4 = prod over p = 1 mod 4 of (e+1), or 0 when some p = 3 mod 4 has odd e.
// Prime powers are swept level by level; at level k each multiple of p^k is divided once more by p.
template <class U>
void sieve_tile(std::uint64_t lo, std::uint64_t len, const std::vector<std::uint32_t>& primes,
                const std::vector<U>& inv, bool with_d, Scratch<U>& s, std::uint8_t* r4, std::uint16_t* d) {
  s.rem.resize(len);
  s.acc.assign(len, 1);
  s.odd.assign(len, 0);
  s.par.assign(len, 0);
  if (with_d) s.dd.assign(len, 1);
  for (std::uint64_t i = 0; i < len; ++i) s.rem[i] = static_cast<U>(lo + i);
  const std::uint64_t hi = lo + len - 1;
  U* rem = s.rem.data();
  std::uint8_t* acc = s.acc.data();
  std::uint8_t* odd = s.odd.data();
  std::uint8_t* par = s.par.data();
  std::uint16_t* dd = s.dd.data();

  for (std::size_t k = 0; k < primes.size(); ++k) {
    const std::uint64_t p = primes[k];
    if (p * p > hi) break;
    const U ip = inv[k];
    std::uint64_t pk = p;
    for (unsigned level = 1;; ++level) {
      std::uint64_t start = (lo + pk - 1) / pk * pk;
      if (start == 0) start = pk;
      const std::uint64_t j0 = start - lo;
      if (p == 2) {
        for (std::uint64_t j = j0; j < len; j += pk) rem[j] >>= 1;
      } else if (p % 4 == 1) {
        if (level == 1) {
          for (std::uint64_t j = j0; j < len; j += pk) {
            rem[j] = static_cast<U>(rem[j] * ip);
            acc[j] = static_cast<std::uint8_t>(acc[j] * 2);
          }
        } else {
          for (std::uint64_t j = j0; j < len; j += pk) {
            rem[j] = static_cast<U>(rem[j] * ip);
            acc[j] = static_cast<std::uint8_t>(acc[j] / level * (level + 1));
          }
        }
      } else {
        for (std::uint64_t j = j0; j < len; j += pk) {
          rem[j] = static_cast<U>(rem[j] * ip);
          par[j] ^= 1;
        }
      }
      if (with_d) {
        if (level == 1) {
          for (std::uint64_t j = j0; j < len; j += pk) dd[j] = static_cast<std::uint16_t>(dd[j] * 2);
        } else {
          for (std::uint64_t j = j0; j < len; j += pk) dd[j] = static_cast<std::uint16_t>(dd[j] / level * (level + 1));
        }
      }
      if (pk > hi / p) break;
      pk *= p;
    }
    if (p % 4 == 3) {
      std::uint64_t start = (lo + p - 1) / p * p;
      if (start == 0) start = p;
      for (std::uint64_t j = start - lo; j < len; j += p) {
        odd[j] |= par[j];
        par[j] = 0;
      }
    }
  }
  for (std::uint64_t i = 0; i < len; ++i) {
    U left = rem[i];
    std::uint32_t a = acc[i];
    std::uint8_t o = odd[i];
    if (left > 1) {
      if (left % 4 == 1) a *= 2;
      else if (left % 4 == 3) o = 1;
    }
    r4[i] = o ? 0 : static_cast<std::uint8_t>(a);
    if (with_d) d[i] = static_cast<std::uint16_t>(left > 1 ? dd[i] * 2 : dd[i]);
  }
  if (lo == 0) {
    r4[0] = 0;
    if (with_d) d[0] = 0;
  }
}

template <class U>
void sieve_all(std::uint64_t n_max, const SieveOptions& opt, const std::vector<std::uint32_t>& primes,
               std::uint8_t* r4, std::uint16_t* d) {
  std::vector<U> inv(primes.size());
  for (std::size_t k = 0; k < primes.size(); ++k) inv[k] = primes[k] == 2 ? U(0) : odd_inverse<U>(primes[k]);
  const std::uint64_t total = n_max + 1;
  const std::uint64_t block = std::max<std::uint64_t>(kTile, opt.block);
  const std::int64_t nblocks = static_cast<std::int64_t>((total + block - 1) / block);
  const bool with_d = d != nullptr;
  parallel_for_index(
      nblocks,
      [&](std::int64_t b) {
        Scratch<U> s;
        std::uint64_t blo = static_cast<std::uint64_t>(b) * block;
        std::uint64_t bhi = std::min(total, blo + block);
        for (std::uint64_t lo = blo; lo < bhi; lo += kTile) {
          std::uint64_t len = std::min(kTile, bhi - lo);
          sieve_tile<U>(lo, len, primes, inv, with_d, s, r4 + lo, with_d ? d + lo : nullptr);
        }
      },
      opt.threads);
}

std::vector<std::pair<std::uint64_t, int>> trial_factor(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

}  // namespace

SieveTable SieveTable::build(std::uint64_t n_max, const SieveOptions& opt) {
  if (n_max < 1) throw std::invalid_argument("N_max must be >= 1");
  if (n_max >= kMaxN) throw CapacityError("N_max must stay below 2^34 (byte-sized r(n)/4)");
  std::uint64_t spf_n = std::min(n_max, kSpfCap) + 1;
  std::uint64_t bytes = (n_max + 1) * (opt.with_divisors ? 3 : 1) + spf_n * 4;
  if (bytes > opt.memory_budget)
    throw CapacityError("sieve to " + std::to_string(n_max) + " needs " + std::to_string(bytes) +
                        " bytes, budget is " + std::to_string(opt.memory_budget));

  std::string dir = opt.cache_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("CURVE_RATIONALS_CACHE_DIR")) dir = env;
  }
  std::string path;
  if (opt.use_cache && !dir.empty()) {
    path = (std::filesystem::path(dir) / cache_file_name(n_max, opt.with_divisors)).string();
    SieveTable t;
    if (load(path, n_max, opt.with_divisors, t)) {
      t.from_cache_ = true;
      t.cache_path_ = path;
      return t;
    }
  }

  SieveTable t;
  t.n_max_ = n_max;
  t.primes_ = small_primes(isqrt(n_max) + 1);
  t.r4_.assign(n_max + 1, 0);
  if (opt.with_divisors) t.d_.assign(n_max + 1, 0);
  std::uint16_t* d = opt.with_divisors ? t.d_.data() : nullptr;
  if (n_max < (1ull << 32))
    sieve_all<std::uint32_t>(n_max, opt, t.primes_, t.r4_.data(), d);
  else
    sieve_all<std::uint64_t>(n_max, opt, t.primes_, t.r4_.data(), d);
  t.finish_aux();
  if (!path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (t.save(path)) t.cache_path_ = path;
  }
  return t;
}

void SieveTable::finish_aux() {
  if (primes_.empty()) primes_ = small_primes(isqrt(n_max_) + 1);
  std::uint64_t spf_n = std::min(n_max_, kSpfCap) + 1;
  spf_.assign(spf_n, 0);
  for (std::uint64_t i = 2; i < spf_n; ++i) {
    if (spf_[i]) continue;
    for (std::uint64_t j = i; j < spf_n; j += i)
      if (!spf_[j]) spf_[j] = static_cast<std::uint32_t>(i);
  }
  std::uint64_t nb = (n_max_ + 1) / kPrefixStride + 1;
  block_prefix_.assign(nb + 1, 0);
  std::uint64_t acc = 0;
  for (std::uint64_t b = 0; b < nb; ++b) {
    block_prefix_[b] = acc;
    std::uint64_t lo = b * kPrefixStride, hi = std::min(n_max_ + 1, lo + kPrefixStride);
    for (std::uint64_t n = std::max<std::uint64_t>(lo, 1); n < hi; ++n) acc += r4_[n];
  }
  block_prefix_[nb] = acc;
}

std::uint32_t SieveTable::d(std::uint64_t n) const {
  check(n);
  if (!d_.empty()) return d_[n];
  if (n == 0) return 0;
  std::uint32_t out = 1;
  for (auto [p, e] : factorize(n)) out *= static_cast<std::uint32_t>(e + 1);
  return out;
}

std::uint64_t SieveTable::range_sum_r(std::uint64_t lo, std::uint64_t hi) const {
  if (hi < lo) return 0;
  check(hi);
  auto S = [this](std::uint64_t x) {  // sum r4[n] for 1 <= n < x
    std::uint64_t b = x / kPrefixStride;
    std::uint64_t s = block_prefix_[b];
    for (std::uint64_t n = std::max<std::uint64_t>(b * kPrefixStride, 1); n < x; ++n) s += r4_[n];
    return s;
  };
  return 4 * (S(hi + 1) - S(std::max<std::uint64_t>(lo, 1)));
}

std::vector<std::pair<std::uint64_t, int>> SieveTable::factorize(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("factorize(0)");
  std::vector<std::pair<std::uint64_t, int>> out;
  if (n < spf_.size()) {
    while (n > 1) {
      std::uint64_t p = spf_[n];
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    return out;
  }
  if (!primes_.empty() && static_cast<std::uint64_t>(primes_.back()) * primes_.back() >= n) {
    for (std::uint64_t p : primes_) {
      if (p * p > n) break;
      if (n % p) continue;
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
  }
  return trial_factor(n);
}

std::int64_t r_bruteforce(std::uint64_t n) {
  std::int64_t count = 0;
  auto lim = static_cast<std::int64_t>(isqrt(n));
  for (std::int64_t a = -lim; a <= lim; ++a) {
    std::uint64_t rest = n - static_cast<std::uint64_t>(a * a);
    auto b = static_cast<std::int64_t>(isqrt(rest));
    if (static_cast<std::uint64_t>(b * b) == rest) count += b == 0 ? 1 : 2;
  }
  return count;
}

GaussCount gauss_count(double x, const SieveTable& t) {
  if (x < 0.0) throw RangeError("gauss_count needs x >= 0");
  auto fx = static_cast<std::uint64_t>(std::floor(x));
  if (fx > t.n_max()) throw RangeError("gauss_count beyond sieve range");
  GaussCount g;
  g.R = fx >= 1 ? t.range_sum_r(1, fx) : 0;
  g.delta = static_cast<double>(static_cast<long double>(g.R) - std::numbers::pi_v<long double> * x);
  g.delta0 = g.delta;
  if (static_cast<double>(fx) == x && fx >= 1) g.delta0 -= 0.5 * static_cast<double>(t.r(fx));
  return g;
}

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t mod_of(std::int64_t h, std::uint64_t m) {
  auto r = static_cast<std::int64_t>(static_cast<__int128>(h) % static_cast<__int128>(m));
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(m) : r);
}

// roots of y^2 + h = 0 mod p^e by lifting roots mod p^k to p^{k+1}
std::int64_t rho_prime_power(std::uint64_t p, int e, std::int64_t h) {
  if (p != 2 && mod_of(h, p) != 0) {
    // Hensel: each simple root mod p lifts uniquely
    std::uint64_t a = (p - mod_of(h, p)) % p;
    std::uint64_t ls = powmod(a, (p - 1) / 2, p);
    return ls == 1 ? 2 : 0;
  }
  std::vector<std::uint64_t> roots;
  for (std::uint64_t y = 0; y < p; ++y)
    if ((mulmod(y, y, p) + mod_of(h, p)) % p == 0) roots.push_back(y);
  std::uint64_t pk = p;
  for (int k = 1; k < e && !roots.empty(); ++k) {
    std::uint64_t next_mod = pk * p;
    std::uint64_t hm = mod_of(h, next_mod);
    std::vector<std::uint64_t> next;
    for (std::uint64_t y : roots)
      for (std::uint64_t j = 0; j < p; ++j) {
        std::uint64_t z = y + j * pk;
        if ((mulmod(z, z, next_mod) + hm) % next_mod == 0) next.push_back(z);
      }
    roots = std::move(next);
    pk = next_mod;
  }
  return static_cast<std::int64_t>(roots.size());
}

}  // namespace

std::int64_t rho_congruence(std::uint64_t m, std::int64_t h, const SieveTable* t) {
  if (m == 0) throw std::invalid_argument("rho_congruence needs m >= 1");
  if (m == 1) return 1;
  auto fac = (t && m <= t->n_max()) ? t->factorize(m) : trial_factor(m);
  std::int64_t out = 1;
  for (auto [p, e] : fac) {
    out *= rho_prime_power(p, e, h);
    if (out == 0) return 0;
  }
  return out;
}

std::int64_t rho_bruteforce(std::uint64_t m, std::int64_t h) {
  std::int64_t c = 0;
  std::uint64_t hm = mod_of(h, m);
  for (std::uint64_t y = 0; y < m; ++y)
    if ((mulmod(y, y, m) + hm) % m == 0) ++c;
  return c;
}

std::uint32_t divisor_count(std::uint64_t n, const SieveTable& t) {
  if (n <= t.n_max()) return t.d(n);
  std::uint32_t out = 1;
  for (auto [p, e] : trial_factor(n)) out *= static_cast<std::uint32_t>(e + 1);
  return out;
}

std::int64_t rho_bound(std::uint64_t m, std::int64_t h, const SieveTable& t) {
  std::uint64_t g = std::gcd(m, static_cast<std::uint64_t>(h < 0 ? -h : h));
  if (g == 0) g = m;
  std::uint64_t d1 = 1, d2 = 1;
  if (g > 1)
    for (auto [p, e] : t.factorize(g)) {
      for (int i = 0; i < e / 2; ++i) d2 *= p;
      if (e % 2) d1 *= p;
    }
  return 2 * static_cast<std::int64_t>(d2) * divisor_count(m / (d1 * d2 * d2), t);
}

namespace {

std::vector<std::uint64_t> divisors_of(const std::vector<std::pair<std::uint64_t, int>>& fac) {
  std::vector<std::uint64_t> ds{1};
  for (auto [p, e] : fac) {
    std::size_t n = ds.size();
    std::uint64_t pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < n; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

}  // namespace

std::uint64_t divisor_split(std::uint64_t n, const SieveTable& t) {
  if (n == 0) throw std::invalid_argument("divisor_split(0)");
  if (n == 1) return 1;
  auto fac = n <= t.n_max() ? t.factorize(n) : trial_factor(n);
  std::uint64_t P = fac.back().first;
  if (static_cast<unsigned __int128>(P) * P > n) return n / P;
  const std::uint64_t root = isqrt(n);
  std::uint64_t rest = n;
  std::uint64_t best = 1;
  std::uint32_t best_d = 1;
  for (int step = 0; rest > 1; ++step) {
    if (step >= 3) throw std::logic_error("divisor_split: greedy chain longer than three");
    auto ds = divisors_of(trial_factor(rest));
    auto it = std::upper_bound(ds.begin(), ds.end(), root);
    std::uint64_t mj = *(it - 1);
    if (mj == 1) throw std::logic_error("divisor_split: cofactor without small divisor");
    std::uint32_t dm = divisor_count(mj, t);
    if (dm > best_d) {
      best = mj;
      best_d = dm;
    }
    rest /= mj;
  }
  return best;
}

std::vector<SquareValueRow> square_value_asymptotics(std::int64_t M, const SieveTable& t) {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (static_cast<std::uint64_t>(M) * M + 1 > t.n_max()) throw RangeError("M^2 + 1 beyond sieve range");
  std::vector<SquareValueRow> rows;
  std::uint64_t s1 = 0, s2 = 0;
  std::int64_t next = 2;
  for (std::int64_t m = 1; m <= M; ++m) {
    auto mm = static_cast<std::uint64_t>(m) * m;
    s1 += t.r(mm);
    s2 += t.r(mm + 1);
    if (m == next || m == M) {
      SquareValueRow row;
      row.M = m;
      row.sum_r_m2 = s1;
      row.sum_r_q2p1 = s2;
      double L = static_cast<double>(m) * std::log(static_cast<double>(m));
      row.ratio_m2 = L > 0 ? s1 / (4.0 / std::numbers::pi * L) : 0.0;
      row.ratio_q2p1 = L > 0 ? s2 / (12.0 / std::numbers::pi * L) : 0.0;
      rows.push_back(row);
      if (m == next) next *= 2;
    }
  }
  return rows;
}

}  // namespace curverat
