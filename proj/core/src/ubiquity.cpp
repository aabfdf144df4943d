#include "curverat/ubiquity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "curverat/parallel.hpp"

namespace curverat {

ResonantSystem::ResonantSystem(std::vector<ResonantPoint> pts, Interval ambient, double truncation,
                               std::string description)
    : pts_(std::move(pts)), ambient_(ambient), truncation_(truncation), description_(std::move(description)) {
  std::sort(pts_.begin(), pts_.end(), [](const ResonantPoint& a, const ResonantPoint& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.beta < b.beta;
  });
}

ResonantSystem ResonantSystem::rationals(Interval ambient, std::int64_t B) {
  if (B < 1) throw DomainError("truncation must be >= 1");
  std::vector<ResonantPoint> pts;
  for (const auto& f : farey_window(ambient.a, ambient.b, B)) pts.push_back({f.value(), static_cast<double>(f.q)});
  std::ostringstream d;
  d << "rationals[" << ambient.a << "," << ambient.b << "] q<=" << B;
  return ResonantSystem(std::move(pts), ambient, static_cast<double>(B), d.str());
}

std::vector<double> ResonantSystem::centers_upto(double B) const {
  std::vector<double> out;
  for (const auto& p : pts_)
    if (p.beta <= B) out.push_back(static_cast<double>(p.x));
  return out;
}

std::vector<double> ResonantSystem::centers_upto(double B, long double a, long double b) const {
  std::vector<double> out;
  auto it = std::lower_bound(pts_.begin(), pts_.end(), a,
                             [](const ResonantPoint& p, long double v) { return p.x < v; });
  for (; it != pts_.end() && it->x <= b; ++it)
    if (it->beta <= B) out.push_back(static_cast<double>(it->x));
  return out;
}

std::int64_t ResonantSystem::count_upto(double B) const {
  return std::count_if(pts_.begin(), pts_.end(), [B](const ResonantPoint& p) { return p.beta <= B; });
}

std::optional<ResonantPoint> ResonantSystem::first_at_least(long double a, double B) const {
  auto it = std::lower_bound(pts_.begin(), pts_.end(), a,
                             [](const ResonantPoint& p, long double v) { return p.x < v; });
  for (; it != pts_.end(); ++it)
    if (it->beta <= B) return *it;
  return std::nullopt;
}

double Schedule::u(int n) const { return std::pow(base, n); }
double Schedule::log_u(int n) const { return n * std::log(base); }

double UbiquityFunction::operator()(double t) const { return std::exp(log_rho_(t)); }

bool UbiquityFunction::decreasing_on(const Schedule& s, int n_lo, int n_hi) const {
  double prev = log_value(s.u(n_lo));
  for (int n = n_lo + 1; n <= n_hi; ++n) {
    double cur = log_value(s.u(n));
    if (!(cur < prev)) return false;
    prev = cur;
  }
  return true;
}

std::string to_string(UbiquityFunction::Growth g) {
  switch (g) {
    case UbiquityFunction::Growth::Log2p: return "log2p";
    case UbiquityFunction::Growth::LogLog16: return "loglog";
    case UbiquityFunction::Growth::Log: return "log";
    case UbiquityFunction::Growth::Staircase: return "staircase";
  }
  return "?";
}

namespace {

double log_psi_real(const ApproximatingFunction& psi, double t) {
  double c = std::ceil(std::max(1.0, t));
  if (c > 9.2e18) throw DomainError("argument beyond the integer range of psi");
  return psi.log_value(static_cast<std::int64_t>(c));
}

}  // namespace

UbiquityFunction UbiquityFunction::corollary7(const ApproximatingFunction& psi, Growth u) {
  UbiquityFunction f;
  f.name_ = "cor7:" + to_string(u) + "|" + psi.describe();
  std::function<double(double)> log_u;
  switch (u) {
    case Growth::Log2p:
      log_u = [](double t) { return std::log(std::log(2.0 + t)); };
      break;
    case Growth::LogLog16:
      log_u = [](double t) { return std::log(std::log(std::log(16.0 + t))); };
      break;
    case Growth::Log:
      log_u = [](double t) { return std::log(std::log(t)); };
      break;
    case Growth::Staircase: {
      // u(h) = sum_{k <= [h]} 2^k psi(2^k)^2, read at h = log2 t
      auto prefix = std::make_shared<std::array<double, 63>>();
      long double acc = 0.0L;
      for (int k = 0; k < 63; ++k) {
        acc += std::exp(static_cast<long double>(k) * std::log(2.0L) + 2.0L * psi.log_value(std::int64_t{1} << k));
        (*prefix)[k] = static_cast<double>(acc);
      }
      log_u = [prefix](double t) {
        int h = static_cast<int>(std::floor(std::log2(std::max(1.0, t))));
        return std::log((*prefix)[std::clamp(h, 0, 62)]);
      };
      break;
    }
  }
  f.log_rho_ = [psi, log_u](double t) { return log_u(t) - 2.0 * std::log(t) - log_psi_real(psi, t); };
  return f;
}

UbiquityFunction UbiquityFunction::power(double a, double c) {
  if (!(a > 0) || !(c > 0)) throw DomainError("pow ubiquity function needs a > 0 and c > 0");
  UbiquityFunction f;
  std::ostringstream d;
  d.precision(17);
  d << "pow:" << a;
  if (c != 1.0) d << "," << c;
  f.name_ = d.str();
  const double lc = std::log(c);
  f.log_rho_ = [a, lc](double t) { return lc - a * std::log(t); };
  return f;
}

UbiquityFunction UbiquityFunction::custom(std::function<double(double)> log_rho, std::string name) {
  UbiquityFunction f;
  f.log_rho_ = std::move(log_rho);
  f.name_ = std::move(name);
  return f;
}

UbiquityFunction parse_ubiquity_function(const std::string& text, const ApproximatingFunction& psi) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad ubiquity function '" + text + "'");
  std::string head = text.substr(0, colon), rest = text.substr(colon + 1);
  if (head == "cor7") {
    if (rest == "log2p") return UbiquityFunction::corollary7(psi, UbiquityFunction::Growth::Log2p);
    if (rest == "loglog") return UbiquityFunction::corollary7(psi, UbiquityFunction::Growth::LogLog16);
    if (rest == "log") return UbiquityFunction::corollary7(psi, UbiquityFunction::Growth::Log);
    if (rest == "staircase") return UbiquityFunction::corollary7(psi, UbiquityFunction::Growth::Staircase);
  } else if (head == "pow") {
    auto comma = rest.find(',');
    try {
      if (comma == std::string::npos) return UbiquityFunction::power(std::stod(rest));
      return UbiquityFunction::power(std::stod(rest.substr(0, comma)), std::stod(rest.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad ubiquity function '" + text + "'");
    }
  }
  throw std::invalid_argument("bad ubiquity function '" + text + "'");
}

double coverage_fraction(const ResonantSystem& sys, const UbiquityFunction& rho, int n, Interval I,
                         const Schedule& schedule) {
  if (!(I.length() > 0)) throw DomainError("interval must have positive length");
  const double u = schedule.u(n);
  if (sys.truncation() < u * (1.0 - 1e-12))
    throw TruncationError("system truncated at " + std::to_string(sys.truncation()) + " < u_n = " + std::to_string(u));
  auto centers = sys.centers_upto(u);
  if (centers.empty()) return 0.0;
  return std::min(1.0, balls_union_measure(std::move(centers), rho(u), I) / I.length());
}

CoverageSeries coverage_series(const ResonantSystem& sys, const UbiquityFunction& rho, int n_lo, int n_hi, Interval I,
                               const Schedule& schedule) {
  if (n_hi < n_lo) throw DomainError("empty n range");
  CoverageSeries s;
  for (int n = n_lo; n <= n_hi; ++n) {
    CoverageRow r;
    r.n = n;
    r.u = schedule.u(n);
    r.rho = rho(r.u);
    r.centers = sys.count_upto(r.u);
    r.fraction = coverage_fraction(sys, rho, n, I, schedule);
    s.rows.push_back(r);
  }
  s.kappa_proxy = 1.0;
  for (std::size_t i = s.rows.size() >= 3 ? s.rows.size() - 3 : 0; i < s.rows.size(); ++i)
    s.kappa_proxy = std::min(s.kappa_proxy, s.rows[i].fraction);
  return s;
}

CurveSystem build_curve_system(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t B, Interval I,
                               int threads) {
  if (B < 1) throw DomainError("truncation must be >= 1");
  auto res = scan_near_curve(
      curve, I, 1, B, [&psi](std::int64_t q) { return psi(q) / static_cast<double>(q); }, true, true, threads);
  CurveSystem cs;
  cs.uncertain = res.uncertain;
  std::vector<ResonantPoint> pts;
  pts.reserve(res.points.size());
  const ExactForm& form = curve.exact();
  std::int64_t on = 0;
  for (const auto& p : res.points) {
    pts.push_back({static_cast<long double>(p.p1) / static_cast<long double>(p.q), static_cast<double>(p.q)});
    const i128 p1 = p.p1, p2 = p.p2, q = p.q;
    if (form.kind == ExactForm::Kind::Parabola && p2 * q == p1 * p1) ++on;
    if (form.kind == ExactForm::Kind::SqrtQuadratic && p2 >= 0 &&
        static_cast<i128>(form.A) * q * q + static_cast<i128>(form.B) * p1 * p1 == p2 * p2)
      ++on;
  }
  if (form.kind != ExactForm::Kind::None) cs.exact_on_curve = on;
  cs.points = std::move(res.points);
  std::ostringstream d;
  d << "curve:" << curve.id() << " psi:" << psi.describe() << " B=" << B << " I=[" << I.a << "," << I.b << "]";
  cs.system = ResonantSystem(std::move(pts), I, static_cast<double>(B), d.str());
  return cs;
}

std::vector<double> theorem4_centers(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t Q,
                                     Interval I, double delta0, int threads) {
  if (!(delta0 > 0 && delta0 < 1)) throw DomainError("delta0 must lie in (0, 1)");
  NearCurveQuery q{curve, Q, psi, I, static_cast<std::int64_t>(std::floor(delta0 * static_cast<double>(Q))),
                   true, true, threads};
  auto rep = enumerate_near_curve(q);
  std::vector<double> c;
  c.reserve(rep.points.size());
  for (const auto& p : rep.points) c.push_back(p.x());
  return c;
}

namespace {

double fraction_at(const std::vector<double>& centers, double radius, Interval I) {
  if (centers.empty()) return 0.0;
  return std::min(1.0, balls_union_measure(centers, radius, I) / I.length());
}

PreconditionCheck t4_precondition(const ApproximatingFunction& psi, std::int64_t Q) {
  return check_decay_condition(psi, std::max<std::int64_t>(1, Q / 2), Q);
}

}  // namespace

Theorem4Report theorem4_verify(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t Q, Interval I,
                               double C1, double delta0, int threads) {
  if (!(C1 > 0)) throw DomainError("C1 must be positive");
  if (!(I.length() > 0)) throw DomainError("interval must have positive length");
  Theorem4Report r;
  r.Q = Q;
  r.delta0 = delta0;
  r.C1 = C1;
  r.precondition = t4_precondition(psi, Q);
  auto centers = theorem4_centers(curve, psi, Q, I, delta0, threads);
  r.count = static_cast<std::int64_t>(centers.size());
  r.radius = C1 / (static_cast<double>(Q) * static_cast<double>(Q) * psi(Q));
  r.fraction = fraction_at(centers, r.radius, I);
  r.pass = r.fraction >= 0.5;
  return r;
}

Theorem4Bisection theorem4_bisect_c1(const PlanarCurve& curve, const ApproximatingFunction& psi, std::int64_t Q,
                                     Interval I, double delta0, double rel_tol, int threads) {
  if (!(I.length() > 0)) throw DomainError("interval must have positive length");
  Theorem4Bisection b;
  b.precondition = t4_precondition(psi, Q);
  auto centers = theorem4_centers(curve, psi, Q, I, delta0, threads);
  b.count = static_cast<std::int64_t>(centers.size());
  if (centers.empty()) return b;
  // a ball of radius |I| about a center in I covers I
  double hi = I.length(), lo = 0.0;
  while (fraction_at(centers, hi / 2, I) >= 0.5 && hi > 1e-300) {
    hi /= 2;
    ++b.iterations;
  }
  lo = hi / 2;
  while ((hi - lo) > rel_tol * hi) {
    double mid = 0.5 * (lo + hi);
    if (fraction_at(centers, mid, I) >= 0.5) hi = mid;
    else lo = mid;
    ++b.iterations;
  }
  b.fraction = fraction_at(centers, hi, I);
  b.C1_star = hi * static_cast<double>(Q) * static_cast<double>(Q) * psi(Q);
  return b;
}

DualPair dual_pair(const PlanarCurve& c) {
  DualPair g;
  g.name = "dual:" + c.id();
  g.g1 = [c](double x) { return x * c.df(x) - c.f(x); };
  g.g2 = [c](double x) { return -c.df(x); };
  g.dg1 = [c](double x) { return x * c.d2f(x); };
  g.dg2 = [c](double x) { return -c.d2f(x); };
  return g;
}

namespace {

bool bikt_hit(const DualPair& g, double x, double delta, double K, std::int64_t T) {
  const double g1 = g.g1(x), g2 = g.g2(x), d1 = g.dg1(x), d2 = g.dg2(x);
  if (delta >= 1.0) return true;  // (0, 0, 1)
  if (std::fabs(d2) < 1e-300) throw DomainError("g2' vanishes at a sample point");
  // (q, p1, p2) and its negative give the same inequalities, so q >= 0
  for (std::int64_t q = 0; q <= T; ++q) {
    double e0 = (-K - q * d1) / d2, e1 = (K - q * d1) / d2;
    if (e0 > e1) std::swap(e0, e1);
    auto lo = static_cast<std::int64_t>(std::ceil(e0)), hi = static_cast<std::int64_t>(std::floor(e1));
    for (std::int64_t p1 = lo; p1 <= hi; ++p1) {
      if (q == 0 && p1 == 0) continue;
      double v = static_cast<double>(q) * g1 + static_cast<double>(p1) * g2;
      double p2 = std::nearbyint(-v);
      if (std::fabs(v + p2) <= delta) return true;
    }
  }
  return false;
}

}  // namespace

BIKTReport measure_BIKT(const DualPair& g, Interval I, double delta, double K, double T, std::int64_t grid,
                        int threads) {
  if (!(delta > 0 && delta <= 1)) throw DomainError("need 0 < delta <= 1");
  if (!(T >= 1)) throw DomainError("need T >= 1");
  if (!(K > 0)) throw DomainError("need K > 0");
  if (delta * K * T > 1.0) throw DomainError("need delta K T <= 1");
  if (grid < 1000) throw DomainError("grid must be >= 1000");
  if (!(I.length() > 0)) throw DomainError("interval must have positive length");
  BIKTReport r;
  r.delta = delta;
  r.K = K;
  r.T = T;
  r.grid = grid;
  const auto Tn = static_cast<std::int64_t>(std::floor(T));
  const std::int64_t nchunks = std::min<std::int64_t>(grid, 256);
  std::vector<std::int64_t> hits(static_cast<std::size_t>(nchunks), 0);
  const double h = I.length() / static_cast<double>(grid);
  parallel_for_index(
      nchunks,
      [&](std::int64_t c) {
        for (std::int64_t i = c; i < grid; i += nchunks)
          if (bikt_hit(g, I.a + (static_cast<double>(i) + 0.5) * h, delta, K, Tn)) ++hits[c];
      },
      threads);
  for (auto v : hits) r.hits += v;
  r.estimate = static_cast<double>(r.hits) / static_cast<double>(grid) * I.length();
  r.scale = std::max(std::cbrt(delta), std::pow(delta * K * T, 1.0 / 9.0)) * I.length();
  r.ratio = r.estimate / r.scale;
  return r;
}

}  // namespace curverat
