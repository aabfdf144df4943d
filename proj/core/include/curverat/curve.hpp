#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curverat/interval_set.hpp"

namespace curverat {

struct CurvatureBound {
  Interval on;
  double c1 = 0.0;
  double c2 = 0.0;
};

// Shape of a fixture that allows exact acceptance decisions.
//   Parabola:      f(x) = x^2
//   SqrtQuadratic: f(x) = sqrt(A + B x^2)
struct ExactForm {
  enum class Kind { None, Parabola, SqrtQuadratic };
  Kind kind = Kind::None;
  long long A = 0;
  long long B = 0;
};

class PlanarCurve {
 public:
  using Fn = std::function<double(double)>;

  PlanarCurve(std::string id, Interval domain, Fn f, Fn df, Fn d2f,
              std::vector<CurvatureBound> bounds = {}, ExactForm exact = {});

  const std::string& id() const { return id_; }
  Interval domain() const { return domain_; }
  double f(double x) const { return f_(x); }
  double df(double x) const { return df_(x); }
  double d2f(double x) const { return d2f_(x); }
  // log f for curves whose values underflow (the Cantor fixture); falls back to log(f)
  double log_f(double x) const;
  const std::vector<CurvatureBound>& curvature_bounds() const { return bounds_; }
  const ExactForm& exact() const { return exact_; }

  void set_log_f(Fn lf) { log_f_ = std::move(lf); }

 private:
  std::string id_;
  Interval domain_;
  Fn f_, df_, d2f_, log_f_;
  std::vector<CurvatureBound> bounds_;
  ExactForm exact_;
};

PlanarCurve parabola();                      // x^2 on [-1, 2]
PlanarCurve unit_circle_upper();             // sqrt(1 - x^2) on (-1, 1)
PlanarCurve circle_sqrt3_upper();            // sqrt(3 - x^2) on (-sqrt3, sqrt3)
PlanarCurve hyperbola_upper();               // sqrt(1 + x^2), the y > 0 branch of y^2 - x^2 = 1
PlanarCurve cantor_curve(int depth);         // sum of bump functions on removed middle thirds, levels 1..depth
struct CurveFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// CSV rows x,f,df,d2f sorted by x; linear interpolation between rows.
// CurveFileError when unreadable, std::invalid_argument on a malformed row.
PlanarCurve curve_from_file(const std::string& path);
// parabola | circle | circle-sqrt3 | hyperbola | cantor:D | file:path
PlanarCurve parse_curve(const std::string& text);

// Samples |f''| on each bound's interval; returns the first offending x if any.
std::optional<double> check_curvature_bounds(const PlanarCurve& c, int samples = 1000);

// Removed intervals of the middle-third construction at levels 1..depth, sorted by left end.
struct CantorGap {
  int level;
  double a;
  double b;
};
std::vector<CantorGap> cantor_gaps(int depth);
// Both endpoints of each of the 2^depth closed intervals surviving level `depth`.
std::vector<double> cantor_endpoints(int depth);

}  // namespace curverat
