#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curverat/approx.hpp"
#include "curverat/curve.hpp"
#include "curverat/rational.hpp"

namespace curverat {

struct NearCurveQuery {
  PlanarCurve curve;
  std::int64_t Q = 1;
  ApproximatingFunction psi = ApproximatingFunction::power(1.0);
  Interval I{0.0, 1.0};
  std::optional<std::int64_t> denominator_floor;  // counts only q > floor
  bool dedupe = true;
  bool keep_points = false;
  int threads = 0;
};

struct CountReport {
  std::int64_t count = 0;
  std::vector<RationalPoint> points;  // sorted by (q, p1, p2) when kept
  double threshold = 0.0;             // psi(Q)/Q
  double psi_Q = 0.0;
  double huxley_ratio = 0.0;          // count / (Q^2 psi(Q))
  std::int64_t uncertain = 0;         // borderline cases on curves without an exact form
  std::int64_t exact_rechecks = 0;    // borderline cases re-decided exactly
  bool exact_fixture = false;
  double seconds = 0.0;
};

CountReport enumerate_near_curve(const NearCurveQuery& query);

// Core scan shared with the resonant systems: accepts (p1, p2, q), q in [q_lo, q_hi], p1/q in I,
// with |f(p1/q) - p2/q| < threshold(q).
struct ScanResult {
  std::int64_t count = 0;
  std::int64_t uncertain = 0;
  std::int64_t exact_rechecks = 0;
  std::vector<RationalPoint> points;
};
ScanResult scan_near_curve(const PlanarCurve& curve, Interval I, std::int64_t q_lo, std::int64_t q_hi,
                           const std::function<double(std::int64_t)>& threshold, bool dedupe, bool keep_points,
                           int threads = 0);

// Exact re-check of |f(p1/q) - p2/q| < tau for the exact fixtures.
bool exact_accept(const ExactForm& form, const RationalPoint& p, double tau);

struct PreconditionCheck {
  bool ok = true;
  std::string reason;
};
// psi(t) -> 0 and 1/(t psi(t)) -> 0, symbolic when possible, otherwise read off the Q range.
PreconditionCheck check_decay_condition(const ApproximatingFunction& psi, std::int64_t Qmin, std::int64_t Qmax);
// t psi(t) -> infinity
PreconditionCheck check_t_psi_diverges(const ApproximatingFunction& psi, std::int64_t Qmin, std::int64_t Qmax);

struct RatioPoint {
  std::int64_t Q = 0;
  std::int64_t count = 0;
  double value = 0.0;
  std::optional<double> excess;  // Huxley exponent excess, missing when undefined
};

struct RatioSeries {
  std::vector<RatioPoint> points;
  PreconditionCheck precondition;
};

// N_f / (Q^2 psi(Q) |I|)
RatioSeries theorem3_ratio_series(const PlanarCurve& curve, const ApproximatingFunction& psi, Interval I,
                                  const std::vector<std::int64_t>& Qs, int threads = 0);
// log(N_f / (Q^2 psi(Q))) / log Q
RatioSeries huxley_probe(const PlanarCurve& curve, const ApproximatingFunction& psi, Interval I,
                         const std::vector<std::int64_t>& Qs, int threads = 0);

struct MultiplicativeReport {
  std::int64_t witness_count = 0;
  std::vector<std::int64_t> witnesses;  // first max_witnesses of them
};
// q <= Q with ||q y1|| ||q y2|| < psi(q)^2
MultiplicativeReport is_multiplicatively_approximable_upto(long double y1, long double y2,
                                                           const ApproximatingFunction& psi, std::int64_t Q,
                                                           std::size_t max_witnesses = 1000);

}  // namespace curverat
