#include "curverat/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "curverat/counting.hpp"

namespace curverat {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Zero: return "ZERO";
    case Classification::Full: return "FULL";
    case Classification::Infinite: return "INFINITE";
    case Classification::ZeroMeasure: return "ZERO_MEASURE";
    case Classification::Diverges: return "DIVERGES";
    case Classification::Converges: return "CONVERGES";
    case Classification::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(LimitKind k) {
  switch (k) {
    case LimitKind::Zero: return "ZERO";
    case LimitKind::Positive: return "POSITIVE";
    case LimitKind::Infinite: return "INFINITE";
    case LimitKind::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

bool monomial_series_converges(double a, double b) {
  if (a < -1.0 - kExponentTol) return true;
  if (a > -1.0 + kExponentTol) return false;
  return b < -1.0 - kExponentTol;
}

namespace {

struct Monomial {
  double a, b;
};

// summand monomials of h^k psi(h)^e, one per psi term
std::vector<Monomial> series_monomials(const ApproximatingFunction& psi, double k, double e) {
  std::vector<Monomial> out;
  for (const auto& t : psi.terms()) out.push_back({k - e * t.v, -e * t.alpha});
  return out;
}

Monomial dominant(const std::vector<Monomial>& ms) {
  Monomial best = ms.front();
  for (const auto& m : ms)
    if (m.a > best.a + kExponentTol || (std::abs(m.a - best.a) <= kExponentTol && m.b > best.b)) best = m;
  return best;
}

std::vector<std::pair<std::int64_t, double>> partial_sums(const std::function<double(std::int64_t)>& log_term,
                                                          std::int64_t hMax) {
  std::vector<std::pair<std::int64_t, double>> out;
  long double acc = 0.0L;
  std::int64_t next = 1;
  for (std::int64_t h = 1; h <= hMax; ++h) {
    acc += std::exp(static_cast<long double>(log_term(h)));
    if (h == next || h == hMax) {
      out.emplace_back(h, static_cast<double>(acc));
      if (h == next) next *= 2;
    }
  }
  return out;
}

// least-squares slope of ys against xs
double slope_of(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// Condensed terms 2^j F(2^j) should shrink geometrically for a convergent sum.
constexpr double kCondenseConverge = -0.1;
constexpr double kCondenseDiverge = -0.02;

Classification condensation_trend(const std::function<double(std::int64_t)>& log_term, std::int64_t hMax,
                                  std::string& reason) {
  int J = 0;
  while ((std::int64_t{1} << (J + 1)) <= hMax) ++J;
  if (J < 6) {
    reason = "range too short for a condensation trend";
    return Classification::Inconclusive;
  }
  std::vector<double> xs, ys;
  for (int j = J / 2; j <= J; ++j) {
    xs.push_back(j);
    ys.push_back((j * std::log(2.0) + log_term(std::int64_t{1} << j)) / std::log(2.0));
  }
  double sl = slope_of(xs, ys);
  std::ostringstream os;
  os << "condensed terms decay like 2^(" << sl << " j)";
  reason = os.str();
  if (sl < kCondenseConverge) return Classification::Converges;
  if (sl > kCondenseDiverge) return Classification::Diverges;
  reason += ", inside the inconclusive band";
  return Classification::Inconclusive;
}

bool flat_table_tail(const ApproximatingFunction& psi) {
  const std::int64_t n = psi.table_size();
  if (n < 4) return true;
  return psi.log_value(n / 2) == psi.log_value(n) && psi.table_extra_v() == 0.0 && psi.terms().empty();
}

}  // namespace

Verdict classify_series(const ApproximatingFunction& psi, double k, double e, std::int64_t hMax) {
  Verdict v;
  auto log_term = [&](std::int64_t h) { return k * std::log(static_cast<double>(h)) + e * psi.log_value(h); };
  if (psi.is_symbolic()) {
    auto ms = series_monomials(psi, k, e);
    bool conv = std::all_of(ms.begin(), ms.end(), [](const Monomial& m) { return monomial_series_converges(m.a, m.b); });
    Monomial d = dominant(ms);
    v.symbolic = true;
    v.exponent_a = d.a;
    v.exponent_b = d.b;
    v.series = conv ? Classification::Converges : Classification::Diverges;
    std::ostringstream os;
    os << "summand ~ h^" << d.a << " (log h)^" << d.b;
    v.reason = os.str();
    v.partial_sums = partial_sums(log_term, hMax);
    return v;
  }
  std::int64_t top = std::min(hMax, psi.table_size());
  v.partial_sums = partial_sums(log_term, top);
  if (flat_table_tail(psi)) {
    v.series = Classification::Inconclusive;
    v.reason = "table is flat over its second half; the constant tail rule decides the sum";
    return v;
  }
  v.series = condensation_trend(log_term, top, v.reason);
  return v;
}

Verdict classify_khintchine(const ApproximatingFunction& psi, int n, std::int64_t hMax) {
  if (n != 1 && n != 2) throw DomainError("Khintchine classifier needs n in {1, 2}");
  Verdict v = classify_series(psi, 0.0, n, hMax);
  v.theorem = "Khintchine";
  if (v.series == Classification::Converges) v.classification = Classification::Zero;
  if (v.series == Classification::Diverges) v.classification = Classification::Full;
  return v;
}

Verdict classify_jarnik(const ApproximatingFunction& psi, double s, JarnikVariant variant, int n, std::int64_t hMax) {
  Verdict v;
  if (variant == JarnikVariant::Ambient) {
    if (!(s > 0.0 && s < n)) throw DomainError("ambient Jarnik classifier needs 0 < s < n");
    v = classify_series(psi, n - s, s, hMax);
    v.theorem = "Jarnik";
    if (v.series == Classification::Converges) v.classification = Classification::Zero;
  } else {
    if (!(s > 0.5 && s < 1.0)) throw DomainError("curve Jarnik classifier needs 1/2 < s < 1");
    v = classify_series(psi, 1.0 - s, s + 1.0, hMax);
    v.theorem = "Jarnik on planar curves";
    if (v.series == Classification::Converges) {
      v.classification = Classification::Zero;
      v.conjectural = true;
      v.reason += "; convergence clause is conjectural except on rational quadrics";
    }
  }
  if (v.series == Classification::Diverges) v.classification = Classification::Infinite;
  return v;
}

LimitVerdict limit_behaviour(const ApproximatingFunction& psi, double k, double e, std::int64_t hMax) {
  LimitVerdict out;
  for (std::int64_t h = 2; h <= hMax; h *= 2)
    out.samples.emplace_back(h, std::exp(k * std::log(static_cast<double>(h)) + e * psi.log_value(h)));
  if (psi.is_symbolic()) {
    bool any_inf = false, all_zero = true;
    for (const auto& m : series_monomials(psi, k, e)) {
      bool zero = m.a < -kExponentTol || (std::abs(m.a) <= kExponentTol && m.b < -kExponentTol);
      bool inf = m.a > kExponentTol || (std::abs(m.a) <= kExponentTol && m.b > kExponentTol);
      any_inf = any_inf || inf;
      all_zero = all_zero && zero;
    }
    out.kind = any_inf ? LimitKind::Infinite : all_zero ? LimitKind::Zero : LimitKind::Positive;
    return out;
  }
  if (out.samples.size() < 6) return out;
  std::vector<double> xs, ys;
  for (std::size_t i = out.samples.size() / 2; i < out.samples.size(); ++i) {
    xs.push_back(static_cast<double>(i));
    ys.push_back(std::log2(out.samples[i].second));
  }
  double sl = slope_of(xs, ys);
  if (sl < -0.02) out.kind = LimitKind::Zero;
  else if (sl > 0.02) out.kind = LimitKind::Infinite;
  return out;
}

DimensionFunction DimensionFunction::power_log(double s, double k) {
  if (!(s >= 0.0)) throw DomainError("dimension function exponent must be >= 0");
  DimensionFunction h;
  h.s_ = s;
  h.k_ = k;
  return h;
}

DimensionFunction DimensionFunction::custom(std::function<double(double)> fn, std::string name) {
  DimensionFunction h;
  h.fn_ = std::move(fn);
  h.name_ = std::move(name);
  return h;
}

double DimensionFunction::operator()(double r) const {
  if (!(r > 0.0)) throw DomainError("dimension function needs r > 0");
  if (fn_) return fn_(r);
  double v = std::pow(r, s_);
  if (k_ != 0.0) v *= std::pow(std::log(1.0 / r), k_);
  return v;
}

std::string DimensionFunction::describe() const {
  if (fn_) return name_;
  std::ostringstream os;
  os.precision(17);
  if (k_ == 0.0) os << "pow:" << s_;
  else os << "powlog:" << s_ << "," << k_;
  return os.str();
}

DimensionFunction parse_dimension_function(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("dimension function must look like pow:s or powlog:s,k");
  std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
  std::vector<double> xs;
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) xs.push_back(std::stod(item));
  if (kind == "pow" && xs.size() == 1) return DimensionFunction::power(xs[0]);
  if (kind == "powlog" && xs.size() == 2) return DimensionFunction::power_log(xs[0], xs[1]);
  throw std::invalid_argument("bad dimension function '" + text + "'");
}

DimensionPreconditions check_dimension_function(const DimensionFunction& h) {
  DimensionPreconditions p;
  std::vector<double> rs;
  for (int j = 1; j <= 12; ++j) rs.push_back(std::pow(10.0, -j));
  for (double r : rs) p.samples.emplace_back(r, h(r));
  if (h.is_symbolic()) {
    const double s = h.s(), k = h.k();
    p.sampled = false;
    p.increasing_to_zero = s > 0.0 || k < 0.0;
    p.ratio_to_infinity = s < 1.0 || (s == 1.0 && k > 0.0);
    p.ratio_decreasing = s < 1.0 || (s == 1.0 && k >= 0.0);
    p.below_half = s > 0.5;
    p.growth = s > 0.0;
    return p;
  }
  auto monotone = [&](auto&& g, bool increasing) {
    for (std::size_t i = 1; i < rs.size(); ++i) {
      double a = g(rs[i - 1]), b = g(rs[i]);
      if (increasing ? !(b > a) : !(b < a)) return false;
    }
    return true;
  };
  p.increasing_to_zero = monotone([&](double r) { return h(r); }, false) && h(rs.back()) < 1e-2 * h(rs.front());
  p.ratio_decreasing = monotone([&](double r) { return h(r) / r; }, true);
  p.ratio_to_infinity = p.ratio_decreasing && h(rs.back()) / rs.back() > 10.0 * h(rs.front()) / rs.front();
  p.below_half = monotone([&](double r) { return std::pow(r, -0.51) * h(r); }, false);
  double worst = 0.0;
  for (double r : rs) worst = std::max(worst, h(r / 2) / h(r));
  p.growth = worst < 1.0;
  return p;
}

Verdict classify_general(const ApproximatingFunction& psi, const DimensionFunction& h, std::int64_t hMax) {
  Verdict v;
  v.theorem = "general dimension function";
  DimensionPreconditions pre = check_dimension_function(h);
  if (!pre.increasing_to_zero) v.failed_preconditions.push_back("h increasing with h(r) -> 0");
  if (!pre.ratio_to_infinity) v.failed_preconditions.push_back("r^-1 h(r) -> infinity");
  if (!pre.ratio_decreasing) v.failed_preconditions.push_back("r^-1 h(r) decreasing");
  if (!pre.below_half) v.failed_preconditions.push_back("r^-(1/2+eps) h(r) -> 0");
  if (!pre.growth) v.failed_preconditions.push_back("growth condition h(l1 r) <= l2 h(r)");

  auto log_term = [&](std::int64_t r) {
    double lr = std::log(static_cast<double>(r));
    double lp = psi.log_value(r);
    double x = std::exp(lp - lr);
    return lr + lp + std::log(h(x));
  };
  if (psi.is_symbolic() && h.is_symbolic()) {
    std::vector<Monomial> ms;
    for (const auto& t : psi.terms()) ms.push_back({1.0 - t.v - h.s() * (1.0 + t.v), -t.alpha * (1.0 + h.s()) + h.k()});
    bool conv = std::all_of(ms.begin(), ms.end(), [](const Monomial& m) { return monomial_series_converges(m.a, m.b); });
    Monomial d = dominant(ms);
    v.symbolic = true;
    v.exponent_a = d.a;
    v.exponent_b = d.b;
    v.series = conv ? Classification::Converges : Classification::Diverges;
    std::ostringstream os;
    os << "summand ~ r^" << d.a << " (log r)^" << d.b;
    v.reason = os.str();
    v.partial_sums = partial_sums(log_term, hMax);
  } else {
    std::int64_t top = psi.is_symbolic() ? hMax : std::min(hMax, psi.table_size());
    v.partial_sums = partial_sums(log_term, top);
    if (!psi.is_symbolic() && flat_table_tail(psi)) {
      v.series = Classification::Inconclusive;
      v.reason = "table is flat over its second half";
    } else {
      v.series = condensation_trend(log_term, top, v.reason);
    }
  }
  const bool ok = v.failed_preconditions.empty();
  if (v.series == Classification::Diverges) {
    v.classification = ok ? Classification::Infinite : Classification::Inconclusive;
  } else if (v.series == Classification::Converges) {
    v.classification = ok ? Classification::Zero : Classification::Inconclusive;
    v.conjectural = true;
    v.reason += "; only the divergence clause is a theorem";
  }
  if (!ok) {
    v.reason += "; failed precondition:";
    for (const auto& f : v.failed_preconditions) v.reason += " [" + f + "]";
  }
  return v;
}

DimensionPrediction predict_dimension_from_lambda(double lambda) {
  DimensionPrediction p;
  p.lambda = lambda;
  p.d = (2.0 - lambda) / (1.0 + lambda);
  p.in_range = lambda >= 0.5 && lambda < 1.0;
  p.note = p.in_range ? "dim{x : f''(x) = 0} <= d is assumed, not checked"
                      : "lambda outside [1/2, 1); formula not asserted";
  return p;
}

DimensionPrediction predict_dimension(const ApproximatingFunction& psi, std::int64_t hMax) {
  auto exact = psi.symbolic_lower_order();
  DimensionPrediction p = predict_dimension_from_lambda(exact ? *exact : lower_order(psi, hMax));
  p.lambda_exact = exact.has_value();
  return p;
}

DimensionPrediction predict_dimension_quadric(QuadricKind kind, double v) {
  DimensionPrediction p = predict_dimension_from_lambda(v);
  p.lambda_exact = true;
  if (kind == QuadricKind::CircleRadiusSqrt3 && v > 1.0) {
    p.d = 0.0;
    p.in_range = true;
    p.note = "circle without rational points, v > 1";
  } else if (v > 1.0) {
    p.d = 1.0 / (1.0 + v);
    p.in_range = kind == QuadricKind::UnitCircle;
    p.note = kind == QuadricKind::UnitCircle ? "rational points on the circle, v > 1" : "v > 1 value read off the circle case";
  }
  return p;
}

namespace {

std::int64_t smallest_Q(const ApproximatingFunction& psi, double delta) {
  auto ok = [&](std::int64_t Q) { return psi.log_value(Q) - std::log(static_cast<double>(Q)) <= std::log(delta); };
  std::int64_t hi = 1;
  while (!ok(hi)) {
    if (hi > (std::int64_t{1} << 40)) throw DomainError("psi(Q)/Q does not reach delta before 2^40");
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // !ok(lo) unless hi == 1
  if (hi == 1) return 1;
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

BoxDimensionReport box_dimension_estimate(const PlanarCurve& curve, const ApproximatingFunction& psi, Interval I,
                                          const BoxDimensionOptions& opt) {
  std::vector<double> deltas = opt.deltas;
  if (deltas.empty())
    for (int j = 8; j <= 18; ++j) deltas.push_back(std::ldexp(1.0, -j));
  if (deltas.size() < 4) throw RegressionError("box counting needs at least 4 delta levels");
  if (!(opt.band > 1.0)) throw DomainError("band must exceed 1");
  BoxDimensionReport rep;
  for (double delta : deltas) {
    BoxLevel lv;
    lv.delta = delta;
    lv.Q = smallest_Q(psi, delta);
    lv.q_lo = static_cast<std::int64_t>(std::floor(static_cast<double>(lv.Q) / opt.band));
    auto res = scan_near_curve(
        curve, I, lv.q_lo + 1, lv.Q, [&](std::int64_t q) { return psi(q) / static_cast<double>(q); }, true, true,
        opt.threads);
    lv.points = res.count;
    const auto nbox = static_cast<std::int64_t>(std::ceil(I.length() / delta));
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    spans.reserve(res.points.size());
    for (const auto& p : res.points) {
      double r = psi(p.q) / static_cast<double>(p.q);
      double lo = std::max(I.a, p.x() - r), hi = std::min(I.b, p.x() + r);
      if (!(hi > lo)) continue;
      auto k0 = static_cast<std::int64_t>(std::floor((lo - I.a) / delta));
      auto k1 = static_cast<std::int64_t>(std::ceil((hi - I.a) / delta)) - 1;
      k0 = std::clamp<std::int64_t>(k0, 0, nbox - 1);
      k1 = std::clamp<std::int64_t>(k1, k0, nbox - 1);
      spans.emplace_back(k0, k1);
    }
    std::sort(spans.begin(), spans.end());
    std::int64_t covered = 0, cur_lo = -1, cur_hi = -2;
    for (auto [a, b] : spans) {
      if (a > cur_hi + 1) {
        covered += cur_hi - cur_lo + 1;
        cur_lo = a;
        cur_hi = b;
      } else {
        cur_hi = std::max(cur_hi, b);
      }
    }
    covered += cur_hi - cur_lo + 1;
    lv.boxes = covered;
    if (covered == 0) ++rep.empty_levels;
    rep.levels.push_back(lv);
  }
  std::vector<double> xs, ys;
  for (const auto& lv : rep.levels) {
    xs.push_back(std::log(1.0 / lv.delta));
    ys.push_back(std::log(static_cast<double>(std::max<std::int64_t>(lv.boxes, 1))));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0)) throw RegressionError("delta levels must not all coincide");
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - rep.intercept - rep.slope * xs[i];
    ssr += e * e;
  }
  rep.std_error = std::sqrt(ssr / (n - 2.0) / sxx);
  rep.band_lo = rep.slope - 2.0 * rep.std_error;
  rep.band_hi = rep.slope + 2.0 * rep.std_error;
  rep.note = "finite-stage slope; evidence for the dimension of the limsup set, not a certificate";
  if (rep.empty_levels > 0) rep.note += "; empty levels counted as one box";
  return rep;
}

}  // namespace curverat
