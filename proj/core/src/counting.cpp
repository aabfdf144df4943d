#include "curverat/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "curverat/parallel.hpp"

namespace curverat {

bool exact_accept(const ExactForm& form, const RationalPoint& p, double tau) {
  const i128 q = p.q, p1 = p.p1, p2 = p.p2;
  switch (form.kind) {
    case ExactForm::Kind::Parabola: {
      i128 D = p1 * p1 - p2 * q;
      if (D < 0) D = -D;
      return sign_int_minus_scaled(D, q * q, tau) < 0;
    }
    case ExactForm::Kind::SqrtQuadratic: {
      i128 N = static_cast<i128>(form.A) * q * q + static_cast<i128>(form.B) * p1 * p1;
      if (N < 0) return false;
      return sqrt_within(N, p2, q, tau);
    }
    case ExactForm::Kind::None:
      break;
  }
  throw std::logic_error("exact_accept on a curve without exact form");
}

namespace {

struct Chunk {
  std::int64_t count = 0, uncertain = 0, rechecks = 0;
  std::vector<RationalPoint> points;
};

void scan_q(const PlanarCurve& curve, Interval I, std::int64_t q, double tau, bool dedupe, bool keep, Chunk& out) {
  const ExactForm& form = curve.exact();
  const bool exact = form.kind != ExactForm::Kind::None;
  const long double ql = static_cast<long double>(q);
  auto p1_lo = static_cast<std::int64_t>(std::ceil(static_cast<long double>(I.a) * ql));
  while (static_cast<long double>(p1_lo - 1) / ql >= I.a) --p1_lo;
  while (static_cast<long double>(p1_lo) / ql < I.a) ++p1_lo;
  auto p1_hi = static_cast<std::int64_t>(std::floor(static_cast<long double>(I.b) * ql));
  while (static_cast<long double>(p1_hi + 1) / ql <= I.b) ++p1_hi;
  while (static_cast<long double>(p1_hi) / ql > I.b) --p1_hi;
  const long double w = ql * static_cast<long double>(tau);
  for (std::int64_t p1 = p1_lo; p1 <= p1_hi; ++p1) {
    long double y;
    switch (form.kind) {
      case ExactForm::Kind::Parabola:
        y = static_cast<long double>(p1) * p1 / ql;
        break;
      case ExactForm::Kind::SqrtQuadratic: {
        long double N = static_cast<long double>(form.A) * ql * ql + static_cast<long double>(form.B) * p1 * p1;
        if (N < 0) continue;
        y = std::sqrt(N);
        break;
      }
      default:
        y = ql * static_cast<long double>(curve.f(static_cast<double>(p1) / static_cast<double>(q)));
    }
    if (!std::isfinite(y)) continue;
    const long double band = 1e-12L * w + (exact ? 1e-17L : 4e-16L) * (std::fabs(y) + 1.0L);
    auto lo = static_cast<std::int64_t>(std::floor(y - w - band));
    auto hi = static_cast<std::int64_t>(std::ceil(y + w + band));
    for (std::int64_t p2 = lo; p2 <= hi; ++p2) {
      long double d = std::fabs(y - static_cast<long double>(p2));
      bool accept;
      if (d < w - band) {
        accept = true;
      } else if (d > w + band) {
        accept = false;
      } else if (exact) {
        ++out.rechecks;
        accept = exact_accept(form, {p1, p2, q}, tau);
      } else {
        ++out.uncertain;
        accept = false;
      }
      if (!accept) continue;
      if (dedupe && gcd3(p1, p2, q) != 1) continue;
      ++out.count;
      if (keep) out.points.push_back({p1, p2, q});
    }
  }
}

}  // namespace

ScanResult scan_near_curve(const PlanarCurve& curve, Interval I, std::int64_t q_lo, std::int64_t q_hi,
                           const std::function<double(std::int64_t)>& threshold, bool dedupe, bool keep_points,
                           int threads) {
  ScanResult res;
  if (q_lo < 1) q_lo = 1;
  if (q_hi < q_lo) return res;
  const Interval dom = curve.domain();
  if (I.a < dom.a - 1e-15 || I.b > dom.b + 1e-15) throw std::invalid_argument("interval I must lie inside the curve domain");
  const std::int64_t span = q_hi - q_lo + 1;
  const std::int64_t nchunks = std::min<std::int64_t>(span, 256);
  std::vector<Chunk> chunks(static_cast<std::size_t>(nchunks));
  parallel_for_index(
      nchunks,
      [&](std::int64_t c) {
        // interleaved assignment balances the O(q) cost per denominator
        for (std::int64_t q = q_lo + c; q <= q_hi; q += nchunks) scan_q(curve, I, q, threshold(q), dedupe, keep_points, chunks[c]);
      },
      threads);
  for (auto& c : chunks) {
    res.count += c.count;
    res.uncertain += c.uncertain;
    res.exact_rechecks += c.rechecks;
    if (keep_points) res.points.insert(res.points.end(), c.points.begin(), c.points.end());
  }
  if (keep_points)
    std::sort(res.points.begin(), res.points.end(), [](const RationalPoint& a, const RationalPoint& b) {
      if (a.q != b.q) return a.q < b.q;
      if (a.p1 != b.p1) return a.p1 < b.p1;
      return a.p2 < b.p2;
    });
  return res;
}

CountReport enumerate_near_curve(const NearCurveQuery& query) {
  if (query.Q < 1) throw std::invalid_argument("Q must be >= 1");
  auto t0 = std::chrono::steady_clock::now();
  CountReport rep;
  rep.psi_Q = query.psi(query.Q);
  rep.threshold = rep.psi_Q / static_cast<double>(query.Q);
  rep.exact_fixture = query.curve.exact().kind != ExactForm::Kind::None;
  std::int64_t q_lo = 1;
  if (query.denominator_floor) {
    if (*query.denominator_floor < 0 || *query.denominator_floor >= query.Q)
      throw std::invalid_argument("denominator floor must lie in [0, Q)");
    q_lo = *query.denominator_floor + 1;
  }
  const double tau = rep.threshold;
  auto res = scan_near_curve(query.curve, query.I, q_lo, query.Q, [tau](std::int64_t) { return tau; }, query.dedupe,
                             query.keep_points, query.threads);
  rep.count = res.count;
  rep.points = std::move(res.points);
  rep.uncertain = res.uncertain;
  rep.exact_rechecks = res.exact_rechecks;
  rep.huxley_ratio = static_cast<double>(rep.count) / (static_cast<double>(query.Q) * query.Q * rep.psi_Q);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

enum class Trend { ToZero, ToInfinity, Neither };

// behaviour of t^k psi(t) for a symbolic psi, as t -> infinity
Trend symbolic_trend(const ApproximatingFunction& psi, double k) {
  bool all_zero = true, some_inf = false;
  for (const auto& t : psi.terms()) {
    double e = k - t.v;
    bool zero = e < 0 || (e == 0 && t.alpha > 0);
    bool inf = e > 0 || (e == 0 && t.alpha < 0);
    all_zero = all_zero && zero;
    some_inf = some_inf || inf;
  }
  if (some_inf) return Trend::ToInfinity;
  if (all_zero) return Trend::ToZero;
  return Trend::Neither;
}

}  // namespace

PreconditionCheck check_decay_condition(const ApproximatingFunction& psi, std::int64_t Qmin, std::int64_t Qmax) {
  PreconditionCheck c;
  if (psi.is_symbolic()) {
    if (symbolic_trend(psi, 0.0) != Trend::ToZero) {
      c.ok = false;
      c.reason = "psi(t) does not tend to 0";
    } else if (symbolic_trend(psi, 1.0) != Trend::ToInfinity) {
      c.ok = false;
      c.reason = "t psi(t) does not tend to infinity";
    }
    return c;
  }
  double a = psi(Qmin), b = psi(Qmax);
  if (!(b < a)) {
    c.ok = false;
    c.reason = "psi not decreasing on the Q range";
  } else if (!(static_cast<double>(Qmax) * b > static_cast<double>(Qmin) * a)) {
    c.ok = false;
    c.reason = "t psi(t) not increasing on the Q range";
  }
  if (psi.in_table_tail(Qmax)) c.reason += (c.reason.empty() ? "" : "; ") + std::string("table tail extension in use");
  return c;
}

PreconditionCheck check_t_psi_diverges(const ApproximatingFunction& psi, std::int64_t Qmin, std::int64_t Qmax) {
  PreconditionCheck c;
  if (psi.is_symbolic()) {
    if (symbolic_trend(psi, 1.0) != Trend::ToInfinity) {
      c.ok = false;
      c.reason = "t psi(t) does not tend to infinity";
    }
    return c;
  }
  if (!(static_cast<double>(Qmax) * psi(Qmax) > static_cast<double>(Qmin) * psi(Qmin))) {
    c.ok = false;
    c.reason = "t psi(t) not increasing on the Q range";
  }
  return c;
}

namespace {

RatioSeries ratio_series(const PlanarCurve& curve, const ApproximatingFunction& psi, Interval I,
                         const std::vector<std::int64_t>& Qs, int threads, bool normalize_by_I) {
  RatioSeries s;
  for (std::int64_t Q : Qs) {
    NearCurveQuery q{curve, Q, psi, I, std::nullopt, true, false, threads};
    auto rep = enumerate_near_curve(q);
    RatioPoint p;
    p.Q = Q;
    p.count = rep.count;
    double base = static_cast<double>(Q) * Q * rep.psi_Q;
    p.value = rep.count / (normalize_by_I ? base * I.length() : base);
    if (Q > 1 && rep.count > 0) p.excess = std::log(rep.count / base) / std::log(static_cast<double>(Q));
    s.points.push_back(p);
  }
  return s;
}

}  // namespace

RatioSeries theorem3_ratio_series(const PlanarCurve& curve, const ApproximatingFunction& psi, Interval I,
                                  const std::vector<std::int64_t>& Qs, int threads) {
  RatioSeries s = ratio_series(curve, psi, I, Qs, threads, true);
  if (!Qs.empty()) s.precondition = check_decay_condition(psi, *std::min_element(Qs.begin(), Qs.end()), *std::max_element(Qs.begin(), Qs.end()));
  return s;
}

RatioSeries huxley_probe(const PlanarCurve& curve, const ApproximatingFunction& psi, Interval I,
                         const std::vector<std::int64_t>& Qs, int threads) {
  RatioSeries s = ratio_series(curve, psi, I, Qs, threads, false);
  for (auto& p : s.points) p.value = p.excess.value_or(std::nan(""));
  if (!Qs.empty()) s.precondition = check_t_psi_diverges(psi, *std::min_element(Qs.begin(), Qs.end()), *std::max_element(Qs.begin(), Qs.end()));
  return s;
}

MultiplicativeReport is_multiplicatively_approximable_upto(long double y1, long double y2,
                                                           const ApproximatingFunction& psi, std::int64_t Q,
                                                           std::size_t max_witnesses) {
  if (Q < 1) throw std::invalid_argument("Q must be >= 1");
  MultiplicativeReport rep;
  auto dist = [](long double v) { return std::fabs(v - std::nearbyint(v)); };
  for (std::int64_t q = 1; q <= Q; ++q) {
    long double a = dist(q * y1), b = dist(q * y2);
    long double p = psi(q);
    if (a * b < p * p) {
      ++rep.witness_count;
      if (rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(q);
    }
  }
  return rep;
}

}  // namespace curverat
