#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curverat/approx.hpp"
#include "curverat/dimension.hpp"
#include "curverat/interval_set.hpp"
#include "curverat/rational.hpp"
#include "curverat/sieve.hpp"

namespace curverat {

// x -> (A x + c) / D with integer A, c and D > 0
struct RationalAffine {
  std::array<std::int64_t, 4> A{1, 0, 0, 1};  // row major
  std::array<std::int64_t, 2> c{0, 0};
  std::int64_t D = 1;

  std::int64_t det() const { return A[0] * A[3] - A[1] * A[2]; }
  bool invertible() const { return D > 0 && det() != 0; }
  RationalPoint apply(const RationalPoint& p) const;
};

//   UnitCircle          x^2 + y^2 = 1
//   CircleRadiusSqrt3   x^2 + y^2 = 3
//   Hyperbola           x1^2 - x2^2 = 1
//   Parabola            y = x^2
struct QuadricFixture {
  QuadricKind kind = QuadricKind::UnitCircle;
  std::optional<RationalAffine> transform;

  std::string describe() const;
};

QuadricFixture parse_quadric(const std::string& text);  // circle | circle-sqrt3 | hyperbola | parabola
std::string to_string(QuadricKind k);

// Exact membership of an untransformed point.
bool on_quadric(QuadricKind kind, const RationalPoint& p);

// Reduced points of denominator <= Qmax on the fixture, sorted.
// The parabola has infinitely many, so it is cut to x in x_window (default [-2, 2]);
// other kinds are filtered by x_window only when one is given.
// A transform is applied after enumeration; image denominators are not re-bounded.
std::vector<RationalPoint> exact_points(const QuadricFixture& fix, std::int64_t Qmax,
                                        std::optional<Interval> x_window = std::nullopt);

// Sum of r(n) over n >= 1 with |c - sqrt n| < x, and the r-mass sitting exactly on |c - sqrt n| = x.
struct WindowSum {
  std::int64_t strict = 0;
  std::int64_t ties = 0;
  std::uint64_t n_lo = 0, n_hi = 0;
};
WindowSum strict_window_sum(std::int64_t c, double x, const SieveTable& t);

struct WmSquare {
  std::int64_t q = 0, s = 0, t = 0;
};

struct WmOptions {
  int k = 1;  // window |x1| <= 2^k for the hyperbola and parabola
  bool enumerate_squares = true;
  bool keep_squares = false;
  std::size_t max_kept = 1u << 20;
  int threads = 0;
};

struct WmReport {
  QuadricKind kind = QuadricKind::UnitCircle;
  int m = 0;
  int k = 0;
  double a = 0.0;  // 2^(k+1) for the hyperbola and parabola
  std::string Psi;
  double Psi_2m = 0.0;
  std::int64_t squares = 0;
  std::vector<WmSquare> kept;
  std::int64_t condition_violations = 0;  // squares failing the necessary annulus/window condition
  double arc_proxy = 0.0;                 // sum of square perimeters 8 Psi(q)/q
  std::int64_t inner_sum = 0;             // strict double sum of r(n)
  std::int64_t inner_ties = 0;            // r-mass on the window boundaries, excluded from inner_sum
  std::int64_t outer_lo = 0, outer_hi = 0;  // outer index range (lo, hi]
  double ratio = 0.0;                     // inner_sum / (2^{2m} Psi(2^m))
  double measure_bound = 0.0;             // Psi(2^m)/2^m * inner_sum
};

WmReport build_Wm(const QuadricFixture& fix, const ApproximatingFunction& Psi, int m, const SieveTable& t,
                  const WmOptions& opt = {});

struct TailRow {
  int m = 0;
  double term = 0.0;                    // 2^m psi(2^m)^2 or 2^{m(2-s)} psi(2^m)^{1+s}
  std::optional<double> aux_term;       // same with the auxiliary Psi (measure case)
  std::optional<double> wm_arc_proxy;
  std::optional<double> wm_ratio;
};

struct TailReport {
  std::vector<TailRow> rows;
  double partial = 0.0;  // sum of term over the rows
  bool hausdorff = false;
  double s = 0.0;
  Verdict verdict;
};

// Dyadic Borel-Cantelli tail. W_m columns are filled when a sieve is given and m <= wm_max_m.
TailReport borel_cantelli_tail(const QuadricFixture& fix, const ApproximatingFunction& psi, std::optional<double> s,
                               int m_lo, int m_hi, const SieveTable* t = nullptr, int wm_max_m = 12);

}  // namespace curverat
