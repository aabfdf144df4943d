#include <cmath>
#include <numbers>

#include "curverat/rational.hpp"
#include "curverat/sieve.hpp"

namespace curverat {

namespace {

bool near_integer(long double t) {
  long double r = std::nearbyint(t);
  return std::fabs(t - r) <= 1e-12L * std::max<long double>(1.0L, std::fabs(t));
}

}  // namespace

NearSquareSumReport sum_r_near_squares(double Q, const ApproximatingFunction& psi, const SieveTable& t,
                                       bool keep_per_q) {
  if (!(Q >= 1.0)) throw std::invalid_argument("Q must be >= 1");
  NearSquareSumReport rep;
  rep.Q = Q;
  rep.psi = psi.describe();
  rep.q_first = static_cast<std::int64_t>(std::floor(Q)) + 1;
  rep.q_last = static_cast<std::int64_t>(std::floor(2 * Q));
  rep.exact_ties = psi.values_exact();
  long double main = 0.0L, psisum = 0.0L;
  long double total2 = 0.0L;  // twice the weighted sum, an integer
  for (std::int64_t q = rep.q_first; q <= rep.q_last; ++q) {
    const double x = psi(q);
    main += 4.0L * std::numbers::pi_v<long double> * q * x;
    psisum += x;
    const std::uint64_t qq = static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q);
    std::uint64_t n_lo, n_hi;
    bool tie_lo = false, tie_hi = false;
    SquareWindow w = square_window(q, x);
    if (x >= static_cast<double>(q)) {
      // sqrt(n) >= q - x holds for every n >= 0
      n_lo = 1;
    } else {
      n_lo = qq - static_cast<std::uint64_t>(w.lo);
      tie_lo = w.lo_tie;
    }
    tie_hi = w.up_tie;
    n_hi = qq + static_cast<std::uint64_t>(w.up);
    if (n_lo < 1) n_lo = 1;
    if (n_hi > t.n_max()) throw RangeError("near-square window at q=" + std::to_string(q) + " exits the sieve");
    std::uint64_t s = t.range_sum_r(n_lo, n_hi);
    long double contrib2 = 2.0L * s;
    if (tie_hi) {
      contrib2 -= t.r(n_hi);
      ++rep.tie_count;
    }
    if (tie_lo) {
      contrib2 -= t.r(n_lo);
      ++rep.tie_count;
    }
    if (!rep.exact_ties) {
      long double xl = x;
      if (near_integer(xl * (2.0L * q + xl)) && !tie_hi) ++rep.tie_uncertain;
      if (x < q && near_integer(xl * (2.0L * q - xl)) && !tie_lo) ++rep.tie_uncertain;
    }
    total2 += contrib2;
    if (keep_per_q) rep.per_q.push_back({q, static_cast<double>(contrib2 / 2.0L)});
  }
  rep.exact_sum = static_cast<double>(total2 / 2.0L);
  rep.main_term = static_cast<double>(main);
  rep.ratio = rep.main_term > 0 ? rep.exact_sum / rep.main_term : 0.0;
  rep.suggested_N = psisum > 0 ? static_cast<double>(Q * Q / psisum) : 0.0;
  return rep;
}

}  // namespace curverat
