#include "curverat/cli/criteria.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "curverat/cantor.hpp"
#include "curverat/cli/cli.hpp"
#include "curverat/counting.hpp"
#include "curverat/dimension.hpp"
#include "curverat/parallel.hpp"
#include "curverat/quadrics.hpp"
#include "curverat/sieve.hpp"
#include "curverat/ubiquity.hpp"

namespace curverat::cli {

namespace {

using i128 = __int128;

const char* kNames[kCriterionCount] = {"sieve",    "gauss",    "theoremA", "lemmas",    "count",       "theorem3",
                                       "theorem4", "cantor",   "dimension", "classifiers", "quadrics", "replay"};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::int64_t isqrt(std::int64_t n) {
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (s * s > n) --s;
  while ((s + 1) * (s + 1) <= n) ++s;
  return s;
}

// ordered signed pairs (a, b) with a^2 + b^2 = n
std::int64_t oracle_r(std::int64_t n) {
  std::int64_t s = isqrt(n), c = 0;
  for (std::int64_t a = -s; a <= s; ++a) {
    std::int64_t rest = n - a * a;
    std::int64_t b = isqrt(rest);
    if (b * b == rest) c += b == 0 ? 1 : 2;
  }
  return c;
}

std::int64_t oracle_divisors(std::int64_t n) {
  std::int64_t c = 0;
  for (std::int64_t d = 1; d * d <= n; ++d)
    if (n % d == 0) c += d * d == n ? 1 : 2;
  return c;
}

// exhaustive parabola oracle: reduced (p1, p2, q), q <= Q, p1/q in [0, 1], |p1^2 - p2 q| / q^2 < tau,
// tau read as the dyadic rational the double stores
std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> oracle_parabola(std::int64_t Q, double tau) {
  int e = 0;
  double m = std::frexp(tau, &e);
  auto M = static_cast<i128>(std::ldexp(m, 53));  // tau = M 2^(e-53)
  int shift = 53 - e;
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> out;
  for (std::int64_t q = 1; q <= Q; ++q) {
    for (std::int64_t p1 = 0; p1 <= q; ++p1) {
      std::int64_t c = p1 * p1 / q;
      for (std::int64_t p2 = c - 1; p2 <= c + 2; ++p2) {
        i128 L = static_cast<i128>(p1) * p1 - static_cast<i128>(p2) * q;
        if (L < 0) L = -L;
        bool accept = shift >= 0 ? (L << shift) < M * q * q : L < ((M * q * q) >> -shift);
        if (!accept) continue;
        if (std::gcd(std::gcd(p1, p2), q) != 1) continue;
        out.emplace(p1, p2, q);
      }
    }
  }
  return out;
}

CriterionResult c1_sieve() {
  CriterionResult r;
  const std::uint64_t N = 100000;
  auto start = std::chrono::steady_clock::now();
  SieveOptions so;
  so.use_cache = false;
  auto t = SieveTable::build(N, so);
  std::int64_t bad = 0;
  std::uint64_t first = 0;
  for (std::uint64_t n = 0; n <= N; ++n) {
    if (t.r(n) != oracle_r(static_cast<std::int64_t>(n))) {
      if (!bad) first = n;
      ++bad;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.pass = bad == 0 && secs < 10.0;
  r.detail = fmt("%lld discrepancies over n <= 100000", static_cast<long long>(bad));
  if (bad) r.detail += fmt(", first at n=%llu", static_cast<unsigned long long>(first));
  return r;
}

CriterionResult c2_gauss() {
  CriterionResult r;
  std::int64_t lattice = 0;
  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b) lattice += a * a + b * b >= 1 && a * a + b * b <= 100;
  const std::uint64_t N = 100'000'000;
  auto t = SieveTable::build(N);
  auto R100 = gauss_count(100.0, t).R;
  double worst = 0.0, worst_x = 0.0;
  for (int j = 0; j <= 64; ++j) {
    double x = std::min(std::pow(10.0, j / 8.0), static_cast<double>(N));
    double ratio = std::abs(gauss_count(x, t).delta) / std::cbrt(x);
    if (ratio > worst) worst = ratio, worst_x = x;
  }
  r.pass = lattice == 316 && static_cast<std::int64_t>(R100) == 316 && worst <= 10.0;
  r.detail = fmt("R(100)=%llu oracle=%lld; max |Delta(x)|/x^(1/3)=%.4g at x=%.4g over 65 grid points to 1e8",
                 static_cast<unsigned long long>(R100), static_cast<long long>(lattice), worst, worst_x);
  return r;
}

CriterionResult c3_theoremA() {
  CriterionResult r;
  auto c = ApproximatingFunction::constant(0.25);
  auto t1 = SieveTable::build(2003ull * 2003ull);
  double part1 = sum_r_near_squares(1000.0, c, t1).ratio;
  bool ok1 = part1 >= 0.97 && part1 <= 1.03;

  auto psi = ApproximatingFunction::power(0.6);
  const double Qs[] = {1024.0, 4096.0, 16384.0};
  auto t2 = SieveTable::build(static_cast<std::uint64_t>((2 * 16384 + 3) * (2 * 16384 + 3)));
  double ratios[3];
  for (int i = 0; i < 3; ++i) ratios[i] = sum_r_near_squares(Qs[i], psi, t2).ratio;
  bool monotone = std::abs(ratios[1] - 1) < std::abs(ratios[0] - 1) && std::abs(ratios[2] - 1) < std::abs(ratios[1] - 1);
  bool lands = ratios[2] >= 0.85 && ratios[2] <= 1.15;
  r.pass = ok1 && monotone && lands;
  r.detail = fmt("const 0.25, Q=1000: ratio %.5f; pow:0.6 at 2^10,2^12,2^14: %.5f %.5f %.5f (monotone %s, in [0.85,1.15] %s)",
                 part1, ratios[0], ratios[1], ratios[2], monotone ? "yes" : "no", lands ? "yes" : "no");
  return r;
}

CriterionResult c4_lemmas() {
  CriterionResult r;
  auto l1 = lemma1_scan(10000, 10000, 2000);
  auto l2 = lemma2_scan(100000);
  r.pass = l1.violations == 0 && l1.rho_mismatches == 0 && l2.violations == 0;
  r.detail = fmt("rho bound: %lld violations over %lld pairs (%lld histogram mismatches); divisor split: %lld violations "
                 "over n <= 100000",
                 static_cast<long long>(l1.violations), static_cast<long long>(l1.pairs),
                 static_cast<long long>(l1.rho_mismatches), static_cast<long long>(l2.violations));
  if (!l1.first_violation.empty()) r.detail += "; " + l1.first_violation;
  if (!l2.first_violation.empty()) r.detail += "; " + l2.first_violation;
  return r;
}

CriterionResult c5_count() {
  CriterionResult r;
  auto psi = ApproximatingFunction::power(1.0);
  auto run = [&](std::int64_t Q) {
    NearCurveQuery q{parabola(), Q, psi, {0.0, 1.0}, std::nullopt, true, true, 0};
    return enumerate_near_curve(q);
  };
  auto four = run(4);
  auto oracle4 = oracle_parabola(4, psi(4) / 4.0);
  bool base = four.count == 3 && oracle4.size() == 3;
  std::int64_t mismatched = 0, first = 0;
  for (std::int64_t Q = 1; Q <= 512; ++Q) {
    auto rep = run(Q);
    auto want = oracle_parabola(Q, rep.threshold);
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> got;
    for (const auto& p : rep.points) got.emplace(p.p1, p.p2, p.q);
    bool same = got == want && rep.count == static_cast<std::int64_t>(want.size()) && rep.uncertain == 0;
    if (!same && !mismatched) first = Q;
    mismatched += !same;
  }
  r.pass = base && mismatched == 0;
  r.detail = fmt("Q=4: %lld points (oracle %zu); %lld of 512 Q values disagree with the oracle",
                 static_cast<long long>(four.count), oracle4.size(), static_cast<long long>(mismatched));
  if (mismatched) r.detail += fmt(", first Q=%lld", static_cast<long long>(first));
  return r;
}

CriterionResult c6_theorem3() {
  CriterionResult r;
  auto psi = ApproximatingFunction::power(0.75);
  std::vector<std::int64_t> Qs;
  for (int k = 8; k <= 13; ++k) Qs.push_back(std::int64_t{1} << k);
  auto ratio = theorem3_ratio_series(parabola(), psi, {0.0, 1.0}, Qs);
  auto hux = huxley_probe(parabola(), psi, {0.0, 1.0}, Qs);
  double lo = INFINITY, ex = -INFINITY;
  for (const auto& p : ratio.points) lo = std::min(lo, p.value);
  bool ex_defined = true;
  for (const auto& p : hux.points) {
    if (p.excess) ex = std::max(ex, *p.excess);
    else ex_defined = false;
  }
  r.pass = lo >= 0.05 && ex_defined && ex <= 0.2;
  r.detail = fmt("min N_f/(Q^2 psi(Q)|I|) = %.4f over Q=2^8..2^13; max Huxley excess %.4f", lo, ex);
  return r;
}

CriterionResult c7_theorem4() {
  CriterionResult r;
  auto psi = ApproximatingFunction::power(0.75);
  double lo = INFINITY, hi = 0.0;
  bool all = true;
  std::string vals;
  for (int k = 8; k <= 12; ++k) {
    auto b = theorem4_bisect_c1(parabola(), psi, std::int64_t{1} << k, {0.0, 1.0}, 0.01);
    if (!b.C1_star) {
      all = false;
      vals += " none";
      continue;
    }
    lo = std::min(lo, *b.C1_star);
    hi = std::max(hi, *b.C1_star);
    vals += fmt(" %.4f", *b.C1_star);
  }
  double spread = all ? hi / lo : INFINITY;
  r.pass = all && spread < 4.0;
  r.detail = fmt("C1* at Q=2^8..2^12:%s; max/min %.3f", vals.c_str(), spread);
  return r;
}

CriterionResult c8_cantor() {
  CriterionResult r;
  FareySource src({0.0, 1.0});
  const double etas[] = {4.0, 16.0, 64.0};
  double prev = NAN;
  bool ok = true;
  std::string d;
  for (double eta : etas) {
    CantorParams p = toy_params(2.2, 0.1, eta);
    p.max_depth = 3;
    p.schedule = Schedule{std::sqrt(2.0)};
    CantorTree tree;
    try {
      tree = build_cantor(src, p);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = fmt("eta=%g: build failed: %s", eta, e.what());
      return r;
    }
    auto chk = check_tree(tree);
    auto md = mass_distribution_check(tree, p.s);
    bool level = tree.depth() == 3 && tree.min_V_over_G() >= 0.5 && chk.ok() && md.pass;
    double step = std::isnan(prev) ? NAN : md.implied_bound / prev;
    bool step_ok = std::isnan(step) || (step >= 2.0 && step <= 8.0);
    ok = ok && level && step_ok;
    d += fmt("eta=%g depth %d V/G>=%.2f disjoint %d nested %d mass err %.1e bink %d bound %.4g%s; ", eta, tree.depth(),
             tree.min_V_over_G(), chk.disjoint, chk.nested, chk.max_mass_error, chk.bink, md.implied_bound,
             std::isnan(step) ? "" : fmt(" (x%.3f)", step).c_str());
    prev = md.implied_bound;
  }
  r.pass = ok;
  d.resize(d.size() - 2);
  r.detail = d;
  return r;
}

CriterionResult c9_dimension() {
  CriterionResult r;
  double d1 = predict_dimension_from_lambda(0.5).d;
  double d2 = predict_dimension_from_lambda(0.75).d;
  double d3 = predict_dimension(ApproximatingFunction::power(0.75)).d;
  bool hand = d1 == 1.0 && d2 == 5.0 / 7.0 && d3 == 5.0 / 7.0;
  auto box = box_dimension_estimate(parabola(), ApproximatingFunction::power(0.75), {0.0, 1.0});
  double smallest = box.levels.empty() ? 1.0 : box.levels.back().delta;
  bool slope_ok = std::abs(box.slope - 5.0 / 7.0) <= 0.15 && smallest <= std::ldexp(1.0, -18);
  r.pass = hand && slope_ok;
  r.detail = fmt("predict 1/2 -> %.17g, 3/4 -> %.17g (5/7 = %.17g); box slope %.4f +- %.4f down to delta=2^%d",
                 d1, d2, 5.0 / 7.0, box.slope, 2 * box.std_error, static_cast<int>(std::log2(smallest)));
  return r;
}

CriterionResult c10_classifiers() {
  CriterionResult r;
  const double v = 0.75;
  const double d = (2.0 - v) / (1.0 + v);
  auto psi = ApproximatingFunction::power_log(v, 1.0 / (d + 1.0));
  auto jv = classify_jarnik(psi, d, JarnikVariant::Curve);
  auto lim = limit_behaviour(psi, 2.0 - d, d + 1.0);
  r.pass = jv.series == Classification::Diverges && lim.kind == LimitKind::Zero;
  r.detail = fmt("psi=%s, s=d=%.6f: curve sum %s (h^%.3g (log h)^%.3g), limsup %s", psi.describe().c_str(), d,
                 to_string(jv.series).c_str(), jv.exponent_a.value_or(NAN), jv.exponent_b.value_or(NAN),
                 to_string(lim.kind).c_str());
  return r;
}

CriterionResult c11_quadrics() {
  CriterionResult r;
  QuadricFixture circle;
  circle.kind = QuadricKind::UnitCircle;
  auto five = exact_points(circle, 5);
  QuadricFixture empty;
  empty.kind = QuadricKind::CircleRadiusSqrt3;
  std::size_t sqrt3 = 0;
  for (std::int64_t Q = 1; Q <= 100; ++Q) sqrt3 += exact_points(empty, Q).size();

  const int mmax = 12;
  auto t = SieveTable::build(static_cast<std::uint64_t>((std::ldexp(1.0, mmax + 1) + 4) * (std::ldexp(1.0, mmax + 1) + 4)));
  const ApproximatingFunction Psis[] = {ApproximatingFunction::constant(0.3),
                                        ApproximatingFunction::power(0.6).auxiliary_half()};
  int mismatches = 0, checked = 0;
  for (const auto& Psi : Psis) {
    WmOptions wo;
    wo.enumerate_squares = false;
    for (int m = 1; m <= mmax; ++m) {
      auto w = build_Wm(circle, Psi, m, t, wo);
      auto s = sum_r_near_squares(std::ldexp(1.0, m), Psi.scaled(4.0), t);
      ++checked;
      if (2.0 * s.exact_sum != 2.0 * static_cast<double>(w.inner_sum) + static_cast<double>(w.inner_ties)) ++mismatches;
    }
  }
  r.pass = five.size() == 12 && sqrt3 == 0 && mismatches == 0;
  r.detail = fmt("unit circle Qmax=5: %zu points; radius sqrt3 Qmax<=100: %zu points; W_m inner sum vs near-squares "
                 "sum: %d of %d mismatches (m<=12, two Psi)",
                 five.size(), sqrt3, mismatches, checked);
  return r;
}

CriterionResult c12_replay(const CriteriaOptions& opt) {
  namespace fs = std::filesystem;
  CriterionResult r;
  fs::path dir = opt.work_dir.empty()
                     ? fs::temp_directory_path() / ("curverat-replay-" + std::to_string(::getpid()))
                     : fs::path(opt.work_dir);
  fs::create_directories(dir);
  auto p = [&](const char* name) { return (dir / name).string(); };
  std::vector<std::vector<std::string>> runs = {
      {"count", "--curve", "parabola", "--Q", "1024", "--psi", "pow:0.75", "--interval", "0,1", "--keep-points",
       "--json", p("count.json"), "--csv", p("count.csv")},
      {"sieve", "theoremA", "--Q", "1000", "--psi", "const:0.25", "--per-q", "--csv", p("ta.csv"), "--json",
       p("ta.json")},
      {"cantor", "massdist", "--eta", "4,16", "--random", "2000", "--seed", "7", "--json", p("md.json"), "--csv",
       p("md.csv")},
      {"quadric", "points", "--kind", "hyperbola", "--Qmax", "60", "--json", p("pts.json")},
      {"ubiquity", "coverage", "--system", "parabola", "--n-hi", "8", "--csv", p("cov.csv")},
  };
  std::vector<std::string> manifests;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    manifests.push_back(p(("run" + std::to_string(i) + ".manifest.json").c_str()));
    runs[i].push_back("--manifest");
    runs[i].push_back(manifests.back());
  }
  int ok = 0;
  std::string fails;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::ostringstream out, err;
    int rc = run(runs[i], out, err);
    if (rc != kOk) {
      fails += fmt(" run %zu exit %d (%s)", i, rc, err.str().c_str());
      continue;
    }
    std::ostringstream rout, rerr;
    int rr = run({"replay", manifests[i], "--into", (dir / "replay").string()}, rout, rerr);
    if (rr == kOk && rout.str().find("replay identical") != std::string::npos) {
      ++ok;
    } else {
      fails += fmt(" replay %zu exit %d", i, rr);
    }
  }
  std::error_code ec;
  if (opt.work_dir.empty()) fs::remove_all(dir, ec);
  r.pass = ok == static_cast<int>(runs.size());
  r.detail = fmt("%d of %zu manifests replayed with identical digests", ok, runs.size()) + fails;
  return r;
}

SieveOptions divisor_sieve_options() {
  SieveOptions so;
  so.with_divisors = true;
  so.use_cache = false;
  return so;
}

}  // namespace

Lemma1Scan lemma1_scan(std::int64_t m_max, std::int64_t h_max, std::int64_t cross_check_m) {
  Lemma1Scan s;
  auto t = SieveTable::build(static_cast<std::uint64_t>(std::max<std::int64_t>({m_max, h_max, 1000})),
                             divisor_sieve_options());
  std::vector<std::int64_t> hist, bound_by_g;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    hist.assign(static_cast<std::size_t>(m), 0);
    for (std::int64_t y = 0; y < m; ++y) ++hist[static_cast<std::size_t>((y * y) % m)];
    bound_by_g.assign(static_cast<std::size_t>(m) + 1, -1);
    auto rho = [&](std::int64_t h) { return hist[static_cast<std::size_t>(((-h) % m + m) % m)]; };
    if (m <= cross_check_m) {
      for (std::int64_t h = 0; h < m; ++h)
        s.rho_mismatches += rho_congruence(static_cast<std::uint64_t>(m), h, &t) != rho(h);
    }
    for (std::int64_t h = -h_max; h <= h_max; ++h) {
      auto g = static_cast<std::size_t>(std::gcd(m, h < 0 ? -h : h));
      if (bound_by_g[g] < 0) bound_by_g[g] = rho_bound(static_cast<std::uint64_t>(m), h, t);
      ++s.pairs;
      if (rho(h) > bound_by_g[g]) {
        if (!s.violations)
          s.first_violation = fmt("rho(%lld;%lld)=%lld > %lld", static_cast<long long>(m), static_cast<long long>(h),
                                  static_cast<long long>(rho(h)), static_cast<long long>(bound_by_g[g]));
        ++s.violations;
      }
    }
  }
  return s;
}

Lemma2Scan lemma2_scan(std::int64_t n_max) {
  Lemma2Scan s;
  auto t = SieveTable::build(static_cast<std::uint64_t>(std::max<std::int64_t>(n_max, 1000)),
                             divisor_sieve_options());
  for (std::int64_t n = 1; n <= n_max; ++n) {
    auto m = static_cast<std::int64_t>(divisor_split(static_cast<std::uint64_t>(n), t));
    std::int64_t dn = oracle_divisors(n), dm = m >= 1 ? oracle_divisors(m) : 0;
    bool ok = m >= 1 && n % m == 0 && m * m <= n && dn <= std::max<std::int64_t>(2, dm * dm * dm);
    ++s.checked;
    if (!ok) {
      if (!s.violations)
        s.first_violation = fmt("n=%lld m=%lld d(n)=%lld d(m)=%lld", static_cast<long long>(n),
                                static_cast<long long>(m), static_cast<long long>(dn), static_cast<long long>(dm));
      ++s.violations;
    }
  }
  return s;
}

std::string criterion_name(int id) {
  if (id < 1 || id > kCriterionCount) return "?";
  return kNames[id - 1];
}

int criterion_id(const std::string& name) {
  for (int i = 1; i <= kCriterionCount; ++i)
    if (name == kNames[i - 1] || name == std::to_string(i)) return i;
  return -1;
}

CriterionResult run_criterion(int id, const CriteriaOptions& opt) {
  if (opt.threads > 0) set_default_threads(opt.threads);
  auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = c1_sieve(); break;
      case 2: r = c2_gauss(); break;
      case 3: r = c3_theoremA(); break;
      case 4: r = c4_lemmas(); break;
      case 5: r = c5_count(); break;
      case 6: r = c6_theorem3(); break;
      case 7: r = c7_theorem4(); break;
      case 8: r = c8_cantor(); break;
      case 9: r = c9_dimension(); break;
      case 10: r = c10_classifiers(); break;
      case 11: r = c11_quadrics(); break;
      case 12: r = c12_replay(opt); break;
      default: r.detail = "unknown criterion";
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = id;
  r.name = criterion_name(id);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_result(const CriterionResult& r) {
  return fmt("criterion %2d %s %-11s %s (%.1f s)", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
             r.seconds);
}

}  // namespace curverat::cli
