#include "curverat/quadrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "curverat/parallel.hpp"

namespace curverat {

namespace {

std::int64_t isqrt(std::int64_t n) {
  if (n <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
  while (static_cast<i128>(r) * r > n) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::pair<std::int64_t, int>> factor_small(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::vector<std::int64_t> divisors_of_square(std::int64_t q) {
  std::vector<std::int64_t> ds{1};
  for (auto [p, e] : factor_small(q)) {
    std::size_t n = ds.size();
    std::int64_t pk = 1;
    for (int i = 1; i <= 2 * e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < n; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

bool in_window(const std::optional<Interval>& w, const RationalPoint& p) {
  if (!w) return true;
  // a <= p1/q <= b, compared as p1 against q*a in long double (window ends are user doubles)
  long double x = static_cast<long double>(p.p1) / static_cast<long double>(p.q);
  return x >= w->a && x <= w->b;
}

}  // namespace

RationalPoint RationalAffine::apply(const RationalPoint& p) const {
  RationalPoint out;
  out.p1 = A[0] * p.p1 + A[1] * p.p2 + c[0] * p.q;
  out.p2 = A[2] * p.p1 + A[3] * p.p2 + c[1] * p.q;
  out.q = D * p.q;
  return reduce(out);
}

std::string to_string(QuadricKind k) {
  switch (k) {
    case QuadricKind::UnitCircle: return "circle";
    case QuadricKind::CircleRadiusSqrt3: return "circle-sqrt3";
    case QuadricKind::Hyperbola: return "hyperbola";
    case QuadricKind::Parabola: return "parabola";
  }
  return "?";
}

std::string QuadricFixture::describe() const {
  std::string s = to_string(kind);
  if (transform) {
    const auto& T = *transform;
    s += "|affine:" + std::to_string(T.A[0]) + "," + std::to_string(T.A[1]) + "," + std::to_string(T.A[2]) + "," +
         std::to_string(T.A[3]) + ";" + std::to_string(T.c[0]) + "," + std::to_string(T.c[1]) + "/" +
         std::to_string(T.D);
  }
  return s;
}

QuadricFixture parse_quadric(const std::string& text) {
  QuadricFixture f;
  if (text == "circle") f.kind = QuadricKind::UnitCircle;
  else if (text == "circle-sqrt3") f.kind = QuadricKind::CircleRadiusSqrt3;
  else if (text == "hyperbola") f.kind = QuadricKind::Hyperbola;
  else if (text == "parabola") f.kind = QuadricKind::Parabola;
  else throw std::invalid_argument("unknown quadric '" + text + "'");
  return f;
}

bool on_quadric(QuadricKind kind, const RationalPoint& p) {
  const i128 s = p.p1, t = p.p2, q = p.q;
  switch (kind) {
    case QuadricKind::UnitCircle: return s * s + t * t == q * q;
    case QuadricKind::CircleRadiusSqrt3: return s * s + t * t == 3 * q * q;
    case QuadricKind::Hyperbola: return s * s - t * t == q * q;
    case QuadricKind::Parabola: return t * q == s * s;
  }
  return false;
}

std::vector<RationalPoint> exact_points(const QuadricFixture& fix, std::int64_t Qmax, std::optional<Interval> x_window) {
  if (Qmax < 1) throw DomainError("Qmax must be >= 1");
  if (fix.transform && !fix.transform->invertible()) throw DomainError("affine transform is not invertible");
  std::vector<RationalPoint> pts;
  auto push = [&](RationalPoint p) {
    if (in_window(x_window, p)) pts.push_back(p);
  };
  switch (fix.kind) {
    case QuadricKind::UnitCircle: {
      for (auto [s, t] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) push({s, t, 1});
      for (std::int64_t mm = 2; mm * mm < 2 * Qmax; ++mm) {
        for (std::int64_t n = 1; n < mm; ++n) {
          if (((mm - n) & 1) == 0 || std::gcd(mm, n) != 1) continue;
          std::int64_t c = mm * mm + n * n;
          if (c > Qmax) break;
          std::int64_t a = mm * mm - n * n, b = 2 * mm * n;
          for (int sx : {1, -1})
            for (int sy : {1, -1}) {
              push({sx * a, sy * b, c});
              push({sx * b, sy * a, c});
            }
        }
      }
      break;
    }
    case QuadricKind::CircleRadiusSqrt3: {
      for (std::int64_t q = 1; q <= Qmax; ++q) {
        std::int64_t lim = isqrt(3 * q * q);
        for (std::int64_t s = -lim; s <= lim; ++s) {
          std::int64_t rest = 3 * q * q - s * s;
          std::int64_t t = isqrt(rest);
          if (t * t != rest) continue;
          for (std::int64_t tt : {t, -t}) {
            RationalPoint p{s, tt, q};
            if (is_reduced(p)) push(p);
            if (t == 0) break;
          }
        }
      }
      break;
    }
    case QuadricKind::Parabola: {
      Interval w = x_window.value_or(Interval{-2.0, 2.0});
      x_window = w;
      // x = a/b reduced gives (ab, a^2, b^2), already reduced
      for (std::int64_t b = 1; b * b <= Qmax; ++b) {
        auto a_lo = static_cast<std::int64_t>(std::ceil(w.a * b)) - 1;
        auto a_hi = static_cast<std::int64_t>(std::floor(w.b * b)) + 1;
        for (std::int64_t a = a_lo; a <= a_hi; ++a) {
          if (std::gcd(a, b) != 1) continue;
          push({a * b, a * a, b * b});
        }
      }
      break;
    }
    case QuadricKind::Hyperbola: {
      // s^2 - t^2 = q^2:  (s - t)(s + t) = q^2
      for (std::int64_t q = 1; q <= Qmax; ++q) {
        for (std::int64_t d : divisors_of_square(q)) {
          std::int64_t e = q * q / d;
          if ((d + e) % 2) continue;
          std::int64_t s = (d + e) / 2, t = (e - d) / 2;
          for (std::int64_t ss : {s, -s}) {
            RationalPoint p{ss, t, q};
            if (is_reduced(p)) push(p);
          }
        }
      }
      break;
    }
  }
  if (fix.transform)
    for (auto& p : pts) p = fix.transform->apply(p);
  std::sort(pts.begin(), pts.end(), [](const RationalPoint& a, const RationalPoint& b) {
    if (a.q != b.q) return a.q < b.q;
    if (a.p1 != b.p1) return a.p1 < b.p1;
    return a.p2 < b.p2;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

WindowSum strict_window_sum(std::int64_t c, double x, const SieveTable& t) {
  if (!(x > 0.0)) throw DomainError("window half-width must be positive");
  auto sign = [&](std::int64_t n) { return sqrt_distance_sign(n, c, x); };
  const long double cl = c, xl = x;
  WindowSum w;
  long double hi_est = (cl + xl) * (cl + xl);
  if (hi_est > static_cast<long double>(t.n_max()) + 2)
    throw RangeError("window around " + std::to_string(c) + " exits the sieve");
  auto u = static_cast<std::int64_t>(std::floor(hi_est));
  while (sign(u + 1) <= 0) ++u;
  while (u >= 1 && sign(u) > 0) --u;
  std::int64_t l;
  if (cl - xl <= 1.0L) {
    l = 1;
  } else {
    l = static_cast<std::int64_t>(std::ceil((cl - xl) * (cl - xl)));
    while (l > 1 && sign(l - 1) <= 0) --l;
  }
  while (l <= u && sign(l) > 0) ++l;
  if (l > u) return w;
  if (static_cast<std::uint64_t>(u) > t.n_max()) throw RangeError("window around " + std::to_string(c) + " exits the sieve");
  w.n_lo = static_cast<std::uint64_t>(l);
  w.n_hi = static_cast<std::uint64_t>(u);
  std::int64_t total = static_cast<std::int64_t>(t.range_sum_r(w.n_lo, w.n_hi));
  if (sign(l) == 0) w.ties += t.r(w.n_lo);
  if (u != l && sign(u) == 0) w.ties += t.r(w.n_hi);
  w.strict = total - w.ties;
  return w;
}

namespace {

struct Box {
  long double x0, x1, y0, y1;
};

// Does the closed box meet the fixture (with the |x| <= X window for hyperbola and parabola)?
bool box_meets(QuadricKind kind, Box b, long double X) {
  if (kind != QuadricKind::UnitCircle && kind != QuadricKind::CircleRadiusSqrt3) {
    b.x0 = std::max(b.x0, -X);
    b.x1 = std::min(b.x1, X);
    if (b.x0 > b.x1) return false;
  }
  auto sq_range = [](long double a, long double c) {
    long double lo = (a <= 0 && c >= 0) ? 0.0L : std::min(a * a, c * c);
    return std::pair{lo, std::max(a * a, c * c)};
  };
  auto [x2lo, x2hi] = sq_range(b.x0, b.x1);
  auto [y2lo, y2hi] = sq_range(b.y0, b.y1);
  switch (kind) {
    case QuadricKind::UnitCircle: return x2lo + y2lo <= 1.0L && 1.0L <= x2hi + y2hi;
    case QuadricKind::CircleRadiusSqrt3: return x2lo + y2lo <= 3.0L && 3.0L <= x2hi + y2hi;
    case QuadricKind::Hyperbola: return x2lo - y2hi <= 1.0L && 1.0L <= x2hi - y2lo;
    case QuadricKind::Parabola: return b.y0 - x2hi <= 0.0L && 0.0L <= b.y1 - x2lo;
  }
  return false;
}

struct Tally {
  std::int64_t squares = 0, violations = 0;
  long double arc = 0.0L;
  std::vector<WmSquare> kept;
};

void squares_for_q(QuadricKind kind, std::int64_t q, double psi, long double X, long double a, bool keep,
                   std::size_t max_kept, Tally& out) {
  const long double ql = q, P = psi;
  auto consider = [&](std::int64_t s, std::int64_t t) {
    Box b{(s - P) / ql, (s + P) / ql, (t - P) / ql, (t + P) / ql};
    if (!box_meets(kind, b, X)) return;
    ++out.squares;
    out.arc += 8.0L * P / ql;
    bool ok = true;
    const long double sl = s, tl = t;
    switch (kind) {
      case QuadricKind::UnitCircle: {
        long double R = 2.0L * std::sqrt(2.0L) * P;
        long double n = sl * sl + tl * tl;
        ok = (ql - R) * (ql - R) <= n && n <= (ql + R) * (ql + R);
        break;
      }
      case QuadricKind::Hyperbola: {
        long double as = std::fabs(sl);
        ok = as / ql > 0.5L && as / ql < a && std::fabs(tl) < as &&
             std::fabs(ql * ql + tl * tl - sl * sl) < 8.0L * as * P + 8.0L * P * P;
        break;
      }
      case QuadricKind::Parabola: {
        ok = std::fabs(sl) / ql < a && tl / ql > -1.0L && tl / ql < a * a &&
             std::fabs(4.0L * sl * sl - 4.0L * tl * ql) < 24.0L * a * a * ql * P + 16.0L * P * P;
        break;
      }
      default:
        break;
    }
    if (!ok) ++out.violations;
    if (keep && out.kept.size() < max_kept) out.kept.push_back({q, s, t});
  };
  if (kind == QuadricKind::UnitCircle) {
    long double R = 2.0L * std::sqrt(2.0L) * P;
    auto smax = static_cast<std::int64_t>(std::ceil(ql + R));
    for (std::int64_t s = -smax; s <= smax; ++s) {
      long double lo2 = (ql - R) * (ql - R) - static_cast<long double>(s) * s;
      long double hi2 = (ql + R) * (ql + R) - static_cast<long double>(s) * s;
      if (hi2 < 0) continue;
      auto t0 = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(0.0L, lo2)))) - 1;
      auto t1 = static_cast<std::int64_t>(std::ceil(std::sqrt(hi2))) + 1;
      t0 = std::max<std::int64_t>(t0, 0);
      for (std::int64_t t = t0; t <= t1; ++t) {
        consider(s, t);
        if (t != 0) consider(s, -t);
      }
    }
    return;
  }
  auto smax = static_cast<std::int64_t>(std::ceil(X * ql + P)) + 1;
  for (std::int64_t s = -smax; s <= smax; ++s) {
    long double x0 = std::max((s - P) / ql, -X), x1 = std::min((s + P) / ql, X);
    if (x0 > x1) continue;
    long double x2lo = (x0 <= 0 && x1 >= 0) ? 0.0L : std::min(x0 * x0, x1 * x1);
    long double x2hi = std::max(x0 * x0, x1 * x1);
    if (kind == QuadricKind::Parabola) {
      auto t0 = static_cast<std::int64_t>(std::floor(x2lo * ql - P)) - 1;
      auto t1 = static_cast<std::int64_t>(std::ceil(x2hi * ql + P)) + 1;
      for (std::int64_t t = t0; t <= t1; ++t) consider(s, t);
    } else {
      if (x2hi < 1.0L) continue;
      long double ylo = std::sqrt(std::max(0.0L, x2lo - 1.0L)), yhi = std::sqrt(x2hi - 1.0L);
      auto t0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(ylo * ql - P)) - 1);
      auto t1 = static_cast<std::int64_t>(std::ceil(yhi * ql + P)) + 1;
      for (std::int64_t t = t0; t <= t1; ++t) {
        consider(s, t);
        if (t != 0) consider(s, -t);
      }
    }
  }
}

}  // namespace

WmReport build_Wm(const QuadricFixture& fix, const ApproximatingFunction& Psi, int m, const SieveTable& t,
                  const WmOptions& opt) {
  if (fix.transform) throw DomainError("W_m families are built on the untransformed fixtures only");
  if (fix.kind == QuadricKind::CircleRadiusSqrt3) throw DomainError("W_m is defined for circle, hyperbola and parabola");
  if (m < 1 || m > 24) throw DomainError("m must lie in [1, 24]");
  WmReport rep;
  rep.kind = fix.kind;
  rep.m = m;
  rep.Psi = Psi.describe();
  const std::int64_t Q = std::int64_t{1} << m;
  rep.Psi_2m = Psi(Q);
  const bool windowed = fix.kind != QuadricKind::UnitCircle;
  if (windowed) {
    rep.k = opt.k;
    rep.a = std::ldexp(1.0, opt.k + 1);
  }
  const long double X = windowed ? std::ldexp(1.0L, opt.k) : 1.0L;

  if (opt.enumerate_squares) {
    const std::int64_t nq = Q;
    const std::int64_t nchunks = std::min<std::int64_t>(nq, 256);
    std::vector<Tally> tallies(static_cast<std::size_t>(nchunks));
    parallel_for_index(
        nchunks,
        [&](std::int64_t c) {
          for (std::int64_t q = Q + 1 + c; q <= 2 * Q; q += nchunks)
            squares_for_q(fix.kind, q, Psi(q), X, rep.a, opt.keep_squares, opt.max_kept, tallies[c]);
        },
        opt.threads);
    long double arc = 0.0L;
    for (auto& tl : tallies) {
      rep.squares += tl.squares;
      rep.condition_violations += tl.violations;
      arc += tl.arc;
      if (opt.keep_squares) rep.kept.insert(rep.kept.end(), tl.kept.begin(), tl.kept.end());
    }
    rep.arc_proxy = static_cast<double>(arc);
    if (opt.keep_squares) {
      std::sort(rep.kept.begin(), rep.kept.end(), [](const WmSquare& x, const WmSquare& y) {
        if (x.q != y.q) return x.q < y.q;
        if (x.s != y.s) return x.s < y.s;
        return x.t < y.t;
      });
      if (rep.kept.size() > opt.max_kept) rep.kept.resize(opt.max_kept);
    }
  }

  // inner double sum; window widths follow the three cases
  std::int64_t lo = Q, hi = 2 * Q;
  std::function<double(std::int64_t)> width;
  switch (fix.kind) {
    case QuadricKind::UnitCircle:
      width = [&](std::int64_t q) { return 4.0 * Psi(q); };
      break;
    case QuadricKind::Hyperbola: {
      const double a = rep.a;
      lo = Q / 2;
      hi = static_cast<std::int64_t>(a) * 2 * Q;
      width = [&Psi, a](std::int64_t s) { return 8.0 * Psi.at_real(static_cast<double>(s) / a); };
      break;
    }
    case QuadricKind::Parabola: {
      const double a = rep.a;
      lo = Q / 2;
      hi = static_cast<std::int64_t>(a * a) * 4 * Q;
      width = [&Psi, a](std::int64_t w) { return 48.0 * Psi.at_real(static_cast<double>(w) / (2.0 * a * a)); };
      break;
    }
    default:
      break;
  }
  rep.outer_lo = lo;
  rep.outer_hi = hi;
  const std::int64_t span = hi - lo;
  const std::int64_t nchunks = std::min<std::int64_t>(span, 256);
  std::vector<std::pair<std::int64_t, std::int64_t>> part(static_cast<std::size_t>(nchunks));
  parallel_for_index(
      nchunks,
      [&](std::int64_t c) {
        for (std::int64_t q = lo + 1 + c; q <= hi; q += nchunks) {
          WindowSum w = strict_window_sum(q, width(q), t);
          part[c].first += w.strict;
          part[c].second += w.ties;
        }
      },
      opt.threads);
  for (auto [s, ti] : part) {
    rep.inner_sum += s;
    rep.inner_ties += ti;
  }
  rep.ratio = static_cast<double>(rep.inner_sum) / (std::ldexp(1.0, 2 * m) * rep.Psi_2m);
  rep.measure_bound = rep.Psi_2m / static_cast<double>(Q) * static_cast<double>(rep.inner_sum);
  return rep;
}

TailReport borel_cantelli_tail(const QuadricFixture& fix, const ApproximatingFunction& psi, std::optional<double> s,
                               int m_lo, int m_hi, const SieveTable* t, int wm_max_m) {
  if (m_lo < 0 || m_hi < m_lo || m_hi > 60) throw DomainError("bad m range");
  TailReport rep;
  rep.hausdorff = s.has_value();
  rep.s = s.value_or(0.0);
  ApproximatingFunction aux = psi.auxiliary_half();
  for (int m = m_lo; m <= m_hi; ++m) {
    TailRow row;
    row.m = m;
    const std::int64_t h = std::int64_t{1} << m;
    const double lp = psi.log_value(h);
    if (rep.hausdorff) {
      row.term = std::exp(m * std::log(2.0) * (2.0 - rep.s) + (1.0 + rep.s) * lp);
    } else {
      row.term = std::exp(m * std::log(2.0) + 2.0 * lp);
      row.aux_term = std::exp(m * std::log(2.0) + 2.0 * aux.log_value(h));
    }
    if (t && m >= 1 && m <= wm_max_m && !fix.transform && fix.kind != QuadricKind::CircleRadiusSqrt3) {
      WmOptions o;
      WmReport w = build_Wm(fix, rep.hausdorff ? psi : aux, m, *t, o);
      row.wm_arc_proxy = w.arc_proxy;
      row.wm_ratio = w.ratio;
    }
    rep.partial += row.term;
    rep.rows.push_back(row);
  }
  if (rep.hausdorff) {
    rep.verdict = classify_jarnik(psi, rep.s, JarnikVariant::Curve);
    rep.verdict.theorem = "Jarnik on rational quadrics";
    rep.verdict.conjectural = false;
  } else {
    rep.verdict = classify_khintchine(psi, 2);
    rep.verdict.theorem = "Khintchine on rational quadrics";
    if (rep.verdict.classification == Classification::Zero) rep.verdict.classification = Classification::ZeroMeasure;
  }
  return rep;
}

}  // namespace curverat
