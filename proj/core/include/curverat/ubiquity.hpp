#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curverat/approx.hpp"
#include "curverat/counting.hpp"
#include "curverat/curve.hpp"
#include "curverat/interval_set.hpp"
#include "curverat/rational.hpp"

namespace curverat {

struct TruncationError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ResonantPoint {
  long double x = 0.0L;
  double beta = 1.0;
};

// Finite family of resonant points with weights, generated up to weight `truncation`.
class ResonantSystem {
 public:
  ResonantSystem() = default;
  ResonantSystem(std::vector<ResonantPoint> pts, Interval ambient, double truncation, std::string description);

  // every reduced p/q in the ambient interval with q <= B, weight q
  static ResonantSystem rationals(Interval ambient, std::int64_t B);

  const std::vector<ResonantPoint>& points() const { return pts_; }  // sorted by x, then beta
  std::size_t size() const { return pts_.size(); }
  Interval ambient() const { return ambient_; }
  double truncation() const { return truncation_; }
  const std::string& description() const { return description_; }

  // centers with beta <= B and x in [a, b]
  std::vector<double> centers_upto(double B) const;
  std::vector<double> centers_upto(double B, long double a, long double b) const;
  std::int64_t count_upto(double B) const;
  // smallest point with x >= a and beta <= B
  std::optional<ResonantPoint> first_at_least(long double a, double B) const;

 private:
  std::vector<ResonantPoint> pts_;
  Interval ambient_{0.0, 1.0};
  double truncation_ = 0.0;
  std::string description_;
};

// u_n = base^n
struct Schedule {
  double base = 2.0;
  double u(int n) const;
  double log_u(int n) const;
};

// rho(t) decreasing to 0, evaluated in log space.
class UbiquityFunction {
 public:
  // slowly growing factor u(t) in rho(t) = u(t) / (t^2 psi(t))
  enum class Growth { Log2p, LogLog16, Log, Staircase };

  static UbiquityFunction corollary7(const ApproximatingFunction& psi, Growth u);
  static UbiquityFunction power(double a, double c = 1.0);  // c t^-a
  static UbiquityFunction custom(std::function<double(double)> log_rho, std::string name);

  double log_value(double t) const { return log_rho_(t); }
  double operator()(double t) const;
  std::string describe() const { return name_; }
  // true when rho is strictly decreasing at the sample points base^n, n in [n_lo, n_hi]
  bool decreasing_on(const Schedule& s, int n_lo, int n_hi) const;

 private:
  std::function<double(double)> log_rho_;
  std::string name_;
};

std::string to_string(UbiquityFunction::Growth g);
// cor7:log2p | cor7:loglog | cor7:log | cor7:staircase | pow:a | pow:a,c
UbiquityFunction parse_ubiquity_function(const std::string& text, const ApproximatingFunction& psi);

// |union of B(R, rho(u_n)) over beta <= u_n, inside I| / |I|
double coverage_fraction(const ResonantSystem& sys, const UbiquityFunction& rho, int n, Interval I,
                         const Schedule& schedule = {});

struct CoverageRow {
  int n = 0;
  double u = 0.0;
  double rho = 0.0;
  std::int64_t centers = 0;
  double fraction = 0.0;
};
struct CoverageSeries {
  std::vector<CoverageRow> rows;
  double kappa_proxy = 0.0;  // min fraction over the last three rows
};
CoverageSeries coverage_series(const ResonantSystem& sys, const UbiquityFunction& rho, int n_lo, int n_hi, Interval I,
                               const Schedule& schedule = {});

struct CurveSystem {
  ResonantSystem system;
  std::vector<RationalPoint> points;
  std::optional<std::int64_t> exact_on_curve;  // missing on curves without an exact form
  std::int64_t uncertain = 0;
};
// first coordinates p1/q of the points with q <= B, p1/q in I and |f(p1/q) - p2/q| < psi(q)/q; weight q
CurveSystem build_curve_system(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t B, Interval I,
                               int threads = 0);

struct Theorem4Report {
  std::int64_t Q = 0;
  double delta0 = 0.0;
  double C1 = 0.0;
  double radius = 0.0;  // C1 / (Q^2 psi(Q))
  std::int64_t count = 0;
  double fraction = 0.0;
  bool pass = false;  // fraction >= 1/2
  PreconditionCheck precondition;
};

// Points of A_Q(I): denominators in (floor(delta0 Q), Q], threshold psi(Q)/Q.
std::vector<double> theorem4_centers(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t Q,
                                     Interval I, double delta0, int threads = 0);

Theorem4Report theorem4_verify(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t Q, Interval I,
                               double C1, double delta0, int threads = 0);

struct Theorem4Bisection {
  std::optional<double> C1_star;  // missing when A_Q(I) is empty
  double fraction = 0.0;          // at C1_star
  std::int64_t count = 0;
  int iterations = 0;
  PreconditionCheck precondition;
};
Theorem4Bisection theorem4_bisect_c1(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t Q,
                                     Interval I, double delta0, double rel_tol = 1e-9, int threads = 0);

// (g1, g2) with derivatives, for the nondivergence set B(I, delta, K, T)
struct DualPair {
  std::function<double(double)> g1, g2, dg1, dg2;
  std::string name;
};
// g1 = x f' - f, g2 = -f'
DualPair dual_pair(const PlanarCurve& curve);

struct BIKTReport {
  double delta = 0.0, K = 0.0, T = 0.0;
  std::int64_t grid = 0;
  std::int64_t hits = 0;
  double estimate = 0.0;  // hits / grid * |I|
  double scale = 0.0;     // max(delta^1/3, (delta K T)^1/9) |I|
  double ratio = 0.0;     // estimate / scale
};
// Midpoint grid; per x an exact search over q in [-T, T], p1 from the derivative bound, p2 by rounding.
BIKTReport measure_BIKT(const DualPair& g, Interval I, double delta, double K, double T, std::int64_t grid,
                        int threads = 0);

}  // namespace curverat
