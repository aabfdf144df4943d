#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curverat/approx.hpp"
#include "curverat/curve.hpp"

namespace curverat {

enum class Classification { Zero, Full, Infinite, ZeroMeasure, Diverges, Converges, Inconclusive };
std::string to_string(Classification c);

// Sum over h >= 2 of h^a (log h)^b: converges iff a < -1 or (a == -1 and b < -1).
// Exponents closer than kExponentTol to the boundary count as on it.
inline constexpr double kExponentTol = 1e-12;
bool monomial_series_converges(double a, double b);

struct Verdict {
  Classification classification = Classification::Inconclusive;
  Classification series = Classification::Inconclusive;  // Diverges, Converges or Inconclusive
  std::string theorem;
  bool conjectural = false;
  bool symbolic = false;  // decided by exponent rules rather than partial sums
  // dominant monomial h^a (log h)^b of the summand, when symbolic
  std::optional<double> exponent_a;
  std::optional<double> exponent_b;
  std::vector<std::pair<std::int64_t, double>> partial_sums;  // cumulative sums at h = 2^j
  std::vector<std::string> failed_preconditions;
  std::string reason;
};

// Sum over h of h^k psi(h)^e, decided symbolically when possible, else by condensation.
Verdict classify_series(const ApproximatingFunction& psi, double k, double e, std::int64_t hMax);

Verdict classify_khintchine(const ApproximatingFunction& psi, int n, std::int64_t hMax = 1 << 20);

enum class JarnikVariant { Ambient, Curve };
Verdict classify_jarnik(const ApproximatingFunction& psi, double s, JarnikVariant variant, int n = 2,
                        std::int64_t hMax = 1 << 20);

// lim h^k psi(h)^e as h -> infinity
enum class LimitKind { Zero, Positive, Infinite, Inconclusive };
std::string to_string(LimitKind k);
struct LimitVerdict {
  LimitKind kind = LimitKind::Inconclusive;
  std::vector<std::pair<std::int64_t, double>> samples;  // value at h = 2^j
};
LimitVerdict limit_behaviour(const ApproximatingFunction& psi, double k, double e, std::int64_t hMax = 1 << 20);

// h(r) = r^s (log 1/r)^k or a custom increasing function.
class DimensionFunction {
 public:
  static DimensionFunction power(double s) { return power_log(s, 0.0); }
  static DimensionFunction power_log(double s, double k);
  static DimensionFunction custom(std::function<double(double)> h, std::string name);

  double operator()(double r) const;
  bool is_symbolic() const { return !fn_; }
  double s() const { return s_; }
  double k() const { return k_; }
  std::string describe() const;

 private:
  double s_ = 1.0, k_ = 0.0;
  std::function<double(double)> fn_;
  std::string name_;
};

// Parse pow:s | powlog:s,k
DimensionFunction parse_dimension_function(const std::string& text);

struct DimensionPreconditions {
  bool ratio_to_infinity = false;   // r^-1 h(r) -> infinity
  bool ratio_decreasing = false;    // r^-1 h(r) decreasing
  bool below_half = false;          // r^-(1/2 + eps) h(r) -> 0 for small eps
  bool growth = false;              // h(l1 r) <= l2 h(r)
  bool increasing_to_zero = false;  // h increasing and h(r) -> 0
  bool sampled = true;              // false when decided from the symbolic form
  std::vector<std::pair<double, double>> samples;  // (r, h(r)) at r = 10^-1 .. 10^-12
};
DimensionPreconditions check_dimension_function(const DimensionFunction& h);

// Sum over r of r psi(r) h(psi(r)/r)
Verdict classify_general(const ApproximatingFunction& psi, const DimensionFunction& h, std::int64_t hMax = 1 << 20);

struct DimensionPrediction {
  double lambda = 0.0;
  double d = 0.0;
  bool lambda_exact = false;
  bool in_range = false;  // lambda in [1/2, 1)
  std::string note;
};
DimensionPrediction predict_dimension(const ApproximatingFunction& psi, std::int64_t hMax = 1 << 20);
DimensionPrediction predict_dimension_from_lambda(double lambda);

enum class QuadricKind { UnitCircle, CircleRadiusSqrt3, Hyperbola, Parabola };
// For psi = h^-v on a rational quadric: 1/(1+v) on circles with points once v > 1, 0 on the empty circle.
DimensionPrediction predict_dimension_quadric(QuadricKind kind, double v);

struct BoxLevel {
  double delta = 0.0;
  std::int64_t Q = 0;        // psi(Q)/Q <= delta, Q minimal
  std::int64_t q_lo = 0;     // denominators counted: q_lo < q <= Q
  std::int64_t points = 0;
  std::int64_t boxes = 0;
};

struct BoxDimensionReport {
  std::vector<BoxLevel> levels;
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double band_lo = 0.0;  // slope -/+ 2 standard errors
  double band_hi = 0.0;
  std::int64_t empty_levels = 0;
  std::string note;
};

struct BoxDimensionOptions {
  std::vector<double> deltas;  // default 2^-8 .. 2^-18
  double band = 2.0;           // denominators in (Q/band, Q]
  int threads = 0;
};

// Slope of log N(delta) against log(1/delta) for the finite-stage sets.
BoxDimensionReport box_dimension_estimate(const PlanarCurve& curve, const ApproximatingFunction& psi, Interval I,
                                          const BoxDimensionOptions& opt = {});

struct RegressionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace curverat
