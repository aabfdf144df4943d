#include "curverat/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "curverat/parallel.hpp"

namespace curverat {

std::optional<Fraction> smallest_fraction_at_least(long double x, std::int64_t N) {
  if (N < 1 || !std::isfinite(x)) return std::nullopt;
  const long double fl = std::floor(x);
  if (std::fabs(fl) > 9.0e18L) return std::nullopt;
  const auto f = static_cast<std::int64_t>(fl);
  if (fl == x) return Fraction{f, 1};
  // lo < x <= hi, neighbours in the Stern-Brocot tree
  std::int64_t a = f, b = 1, c = f + 1, d = 1;
  for (;;) {
    if (b + d > N) break;
    const long double num = static_cast<long double>(c) - x * d;  // >= 0
    const long double den = x * b - static_cast<long double>(a);  // > 0
    // hi_k = (c + k a)/(d + k b) stays >= x while k <= num/den
    auto k = static_cast<std::int64_t>(std::floor(num / den));
    k = std::min(k, (N - d) / b);
    if (k >= 1) {
      c += k * a;
      d += k * b;
      continue;
    }
    // lo_k = (a + k c)/(b + k d) stays < x while k num < den
    std::int64_t kl;
    if (num <= 0) {
      kl = (N - b) / d;
    } else {
      long double r = den / num;
      kl = static_cast<std::int64_t>(std::min<long double>(std::floor(r), 9.0e18L));
      if (static_cast<long double>(kl) * num >= den) --kl;
      kl = std::min(kl, (N - b) / d);
    }
    if (kl < 1) break;
    a += kl * c;
    b += kl * d;
  }
  return Fraction{c, d};
}

std::optional<ResonantPoint> FareySource::first_at_least(long double a, double B) const {
  if (a < ambient_.a) a = ambient_.a;
  if (!(B >= 1)) return std::nullopt;
  auto f = smallest_fraction_at_least(a, static_cast<std::int64_t>(std::min(B, 9.0e18)));
  if (!f) return std::nullopt;
  long double v = f->value();
  if (v > ambient_.b) return std::nullopt;
  return ResonantPoint{v, static_cast<double>(f->q)};
}

double FareySource::truncation() const { return std::numeric_limits<double>::infinity(); }

std::string FareySource::describe() const {
  std::ostringstream d;
  d << "rationals[" << ambient_.a << "," << ambient_.b << "]";
  return d.str();
}

LogFunction log_power(double a, double c) {
  std::ostringstream d;
  d.precision(17);
  d << "pow:" << a;
  if (c != 1.0) d << "," << c;
  const double lc = std::log(c);
  return {[a, lc](double u) { return lc - a * std::log(u); }, d.str()};
}

std::string to_string(CantorBranch b) {
  switch (b) {
    case CantorBranch::Auto: return "auto";
    case CantorBranch::Finite: return "finite";
    case CantorBranch::Infinite: return "infinite";
  }
  return "?";
}

CantorParams toy_params(double tau, double s, double eta) {
  CantorParams p;
  p.s = s;
  p.eta = eta;
  p.rho = log_power(2.0);
  p.Psi = log_power(tau);
  return p;
}

double CantorTree::min_V_over_G() const {
  double m = 1.0;
  for (const auto& st : steps)
    if (st.G > 0) m = std::min(m, static_cast<double>(st.V) / static_cast<double>(st.G));
  return m;
}

namespace {

// Greedy left-to-right sweep: points of the source with beta <= B and centers in [lo, hi],
// keeping a point when its distance to the previously kept one exceeds 2 * sep.
std::vector<ResonantPoint> thinned(const ResonantSource& src, long double lo, long double hi, double B, long double sep,
                                   std::size_t cap) {
  std::vector<ResonantPoint> out;
  long double x = lo;
  while (out.size() < cap) {
    auto p = src.first_at_least(x, B);
    if (!p || p->x > hi) break;
    out.push_back(*p);
    x = std::nextafter(p->x + 2.0L * sep, std::numeric_limits<long double>::infinity());
  }
  return out;
}

// need items from the candidates, one per contiguous block, preferring the largest weight.
std::vector<ResonantPoint> spread_select(const std::vector<ResonantPoint>& cand, std::int64_t need) {
  std::vector<ResonantPoint> out;
  const auto M = static_cast<std::int64_t>(cand.size());
  for (std::int64_t j = 0; j < need; ++j) {
    std::int64_t b0 = j * M / need, b1 = (j + 1) * M / need;
    std::int64_t best = b0;
    for (std::int64_t i = b0; i < b1; ++i)
      if (cand[i].beta > cand[best].beta) best = i;
    out.push_back(cand[best]);
  }
  return out;
}

struct Level {
  double log_rho, log_Psi;
};

Level level_at(const CantorParams& p, int t) {
  double u = p.schedule.u(t);
  return {p.rho.log(u), p.Psi.log(u)};
}

double log_g(const CantorParams& p, int t) {
  Level l = level_at(p, t);
  return p.s * l.log_Psi - l.log_rho;
}

void validate(const CantorParams& p, const ResonantSource& src) {
  if (!(p.s > 0 && p.s < 1)) throw CantorParamError("s must lie in (0, 1)");
  if (!(p.c1 > 0 && p.c1 < 1)) throw CantorParamError("c1 must lie in (0, 1)");
  if (!(p.lambda > 0 && p.lambda < 1.0 / 9.0)) throw CantorParamError("lambda must lie in (0, 1/9)");
  if (!(p.varpi_value() > 0)) throw CantorParamError("varpi must be positive");
  if (!(p.schedule.base > 1)) throw CantorParamError("schedule base must exceed 1");
  if (p.max_depth < 1 || p.max_depth > 12) throw CantorParamError("max_depth must lie in [1, 12]");
  if (!p.rho.log || !p.Psi.log) throw CantorParamError("rho and Psi are required");
  if (!(src.ambient().length() > 0)) throw CantorParamError("ambient interval is empty");
  if (p.g_probe_hi <= p.g_probe_lo + 3) throw CantorParamError("G probe range too short");
}

// slope of log g(u_n) against log u_n over the upper half of the probe range
double g_slope(const CantorParams& p) {
  int lo = (p.g_probe_lo + p.g_probe_hi) / 2, hi = p.g_probe_hi;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int t = lo; t <= hi; ++t) {
    double x = p.schedule.log_u(t), y = log_g(p, t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

class Builder {
 public:
  Builder(const ResonantSource& src, const CantorParams& p) : src_(src), p_(p) {}

  CantorTree run() {
    validate(p_, src_);
    tree_.params = p_;
    tree_.source = src_.describe();
    tree_.varpi = p_.varpi_value();
    tree_.G_slope = g_slope(p_);
    double sup = 0;
    for (int t = p_.g_probe_lo; t <= p_.g_probe_hi; ++t) sup = std::max(sup, log_g(p_, t));
    tree_.G_star = std::max(2.0, std::exp(sup));
    tree_.branch = p_.branch;
    if (tree_.branch == CantorBranch::Auto)
      tree_.branch = tree_.G_slope > 0.05 ? CantorBranch::Infinite : CantorBranch::Finite;
    if (tree_.branch == CantorBranch::Infinite) {
      if (!(p_.eta >= 1)) throw CantorParamError("eta must be >= 1");
    } else {
      if (!(p_.eta > tree_.G_star))
        throw CantorParamError("eta must exceed G* = " + std::to_string(tree_.G_star));
      if (!(tree_.G_star < p_.eta / (24.0 * tree_.varpi))) throw CantorParamError("G* must be below eta / (24 varpi)");
    }

    Interval I0 = src_.ambient();
    CantorNode root;
    root.center = 0.5L * (static_cast<long double>(I0.a) + I0.b);
    root.radius = 0.5L * (static_cast<long double>(I0.b) - I0.a);
    root.log2radius = std::log2(static_cast<double>(root.radius));
    root.mu = 1.0L;
    tree_.nodes.push_back(root);
    tree_.generations.push_back({0});
    tree_.t.push_back(0);

    int t_prev = 0;
    for (int n = 1; n <= p_.max_depth; ++n) {
      if (tree_.branch == CantorBranch::Infinite) t_prev = infinite_level(n, t_prev);
      else t_prev = finite_level(n, t_prev);
    }
    return std::move(tree_);
  }

 private:
  // the root interval counts as a ball of radius |I_0|, which keeps #G <= r(B)/rho with centers in I_0
  double log_r(std::int64_t node) const {
    if (node == 0) return std::log(src_.ambient().length());
    return tree_.nodes[node].log2radius * std::log(2.0);
  }

  // #G_B required at radius scale rho: [c1 r(B) / rho]
  std::int64_t need_count(double log_rB, double log_rho) const {
    double v = std::exp(std::log(p_.c1) + log_rB - log_rho);
    if (v > 9e15) return std::numeric_limits<std::int64_t>::max();
    return static_cast<std::int64_t>(std::floor(v));
  }

  // candidates of G~_B(t): greedy thinning at 2 rho in the half ball
  std::vector<ResonantPoint> candidates(std::int64_t parent, int t, std::size_t cap) const {
    const auto& B = tree_.nodes[parent];
    Level l = level_at(p_, t);
    Interval I0 = src_.ambient();
    long double half = parent == 0 ? B.radius : 0.5L * B.radius;
    long double lo = std::max<long double>(B.center - half, I0.a), hi = std::min<long double>(B.center + half, I0.b);
    long double rho = std::exp(static_cast<long double>(l.log_rho));
    return thinned(src_, lo, hi, p_.schedule.u(t), 2.0L * rho, cap);
  }

  // G_B(t) or nullopt when the counting estimate fails for B at t
  std::optional<std::vector<ResonantPoint>> G_of(std::int64_t parent, int t, std::int64_t* cand_count) const {
    Level l = level_at(p_, t);
    double lrB = log_r(parent);
    if (!(std::log(24.0) + l.log_rho < lrB)) return std::nullopt;
    if (!(std::log(2.0) + l.log_Psi < l.log_rho)) return std::nullopt;
    std::int64_t need = need_count(lrB, l.log_rho);
    if (need < 1 || need > p_.max_nodes) return std::nullopt;
    // thinned count is at most r(B) / (4 rho) + 1
    auto cand = candidates(parent, t, static_cast<std::size_t>(std::min<double>(
                                          1e8, std::exp(lrB - l.log_rho) / 4.0 + 2.0)));
    if (cand_count) *cand_count = static_cast<std::int64_t>(cand.size());
    if (static_cast<std::int64_t>(cand.size()) < need) return std::nullopt;
    return spread_select(cand, need);
  }

  void push_child(std::int64_t parent, const ResonantPoint& R, int t, int depth, int sub, long double mu) {
    CantorNode c;
    c.depth = depth;
    c.sublevel = sub;
    c.t = t;
    c.center = R.x;
    c.beta = R.beta;
    Level l = level_at(p_, t);
    c.log2radius = l.log_Psi / std::log(2.0);
    c.radius = std::exp2(static_cast<long double>(c.log2radius));
    c.parent = parent;
    c.mu = mu;
    tree_.nodes.push_back(c);
    if (static_cast<std::int64_t>(tree_.nodes.size()) > p_.max_nodes)
      throw CantorError("node capacity " + std::to_string(p_.max_nodes) + " exceeded at depth " + std::to_string(depth));
  }

  // log of eta (2/|I0|) c1^-n prod_{m<n} rho(u_{t_m}) / Psi(u_{t_m})
  double product_lhs(int n) const {
    double v = std::log(p_.eta) + std::log(2.0 / src_.ambient().length()) - n * std::log(p_.c1);
    for (int m = 1; m < n; ++m) {
      Level l = level_at(p_, tree_.t[m]);
      v += l.log_rho - l.log_Psi;
    }
    return v;
  }

  int infinite_level(int n, int t_prev) {
    const auto& parents = tree_.generations[n - 1];
    const double lhs = product_lhs(n);
    for (int t = std::max(t_prev + 1, 1); t <= p_.t_max; ++t) {
      if (lhs > log_g(p_, t)) continue;
      Level l = level_at(p_, t);
      // cheap gates before any enumeration
      bool ok = true;
      long double total = 0;
      for (auto b : parents) {
        double lrB = log_r(b);
        if (!(std::log(24.0) + l.log_rho < lrB)) {
          ok = false;
          break;
        }
        total += static_cast<long double>(need_count(lrB, l.log_rho));
      }
      if (!ok) continue;
      if (total + tree_.nodes.size() > static_cast<long double>(p_.max_nodes))
        throw CantorError("depth " + std::to_string(n) + " would need " + std::to_string(static_cast<double>(total)) +
                          " balls; node capacity " + std::to_string(p_.max_nodes));
      std::vector<std::vector<ResonantPoint>> picks(parents.size());
      std::vector<std::int64_t> ccount(parents.size(), 0);
      std::vector<char> good(parents.size(), 0);
      parallel_for_index(static_cast<std::int64_t>(parents.size()), [&](std::int64_t i) {
        auto G = G_of(parents[i], t, &ccount[i]);
        if (G) {
          picks[i] = std::move(*G);
          good[i] = 1;
        }
      });
      if (std::find(good.begin(), good.end(), 0) != good.end()) continue;
      tree_.t.push_back(t);
      std::vector<std::int64_t> gen;
      for (std::size_t i = 0; i < parents.size(); ++i) {
        const long double mu = tree_.nodes[parents[i]].mu / static_cast<long double>(picks[i].size());
        for (const auto& R : picks[i]) {
          push_child(parents[i], R, t, n, 0, mu);
          gen.push_back(static_cast<std::int64_t>(tree_.nodes.size()) - 1);
        }
        auto G = static_cast<std::int64_t>(picks[i].size());
        tree_.steps.push_back({n, 0, parents[i], G, G, ccount[i]});
      }
      tree_.generations.push_back(std::move(gen));
      return t;
    }
    throw CantorError("no admissible t_" + std::to_string(n) + " up to t_max = " + std::to_string(p_.t_max));
  }

  // smallest stride with rho(u_{t+stride}) <= lambda rho(u_t) on the probe range
  int stride() const {
    for (int k = 1; k <= 64; ++k) {
      bool ok = true;
      for (int t = p_.g_probe_lo; t < p_.g_probe_hi && ok; ++t)
        ok = level_at(p_, t + k).log_rho <= std::log(p_.lambda) + level_at(p_, t).log_rho;
      if (ok) return k;
    }
    throw CantorParamError("rho does not decay fast enough for any subsequence stride <= 64");
  }

  int finite_level(int n, int t_prev) {
    const auto& parents = tree_.generations[n - 1];
    const int k_stride = stride();
    const double lvarpi = std::log(tree_.varpi);
    const double lGstar = std::log(tree_.G_star);
    // D(B) = eta at the first level, r(B)^{s-1} afterwards
    auto logD = [&](std::int64_t b) { return n == 1 ? std::log(p_.eta) : (p_.s - 1.0) * log_r(b); };
    int t = std::max(t_prev + 1, 1);
    for (;; ++t) {
      if (t > p_.t_max) throw CantorError("no admissible t_" + std::to_string(n) + " up to t_max");
      Level l = level_at(p_, t);
      if (!(log_g(p_, t) < lGstar)) continue;
      bool ok = true;
      for (auto b : parents) {
        double lD = logD(b);
        if (!((p_.s - 1.0) * l.log_Psi > lD - lvarpi)) ok = false;
        if (!(lGstar < lD - std::log(24.0) - lvarpi)) ok = false;
        if (!ok) break;
      }
      if (!ok) continue;
      bool counts = true;
      for (auto b : parents)
        if (!G_of(b, t, nullptr)) {
          counts = false;
          break;
        }
      if (counts) break;
    }
    tree_.t.push_back(t);
    std::vector<std::int64_t> gen;
    int t_last = t;
    for (auto b : parents) {
      const double lD = logD(b);
      // k_n(B): number of terms whose running sum stays <= D / (24 varpi)
      const double cap = std::exp(lD - std::log(24.0) - lvarpi);
      double acc = 0;
      int k = 0;
      while (true) {
        acc += std::exp(log_g(p_, t + k * k_stride));
        if (acc > cap) break;
        ++k;
        if (k + 1 > p_.max_sublevels)
          throw CantorError("k_n(B) exceeds max_sublevels = " + std::to_string(p_.max_sublevels) + " at depth " +
                            std::to_string(n) + "; raise varpi or max_sublevels");
      }
      if (k < 1) throw CantorError("k_n(B) < 1 at depth " + std::to_string(n));
      struct Trim {
        long double c;
        long double h;
      };
      std::vector<Trim> trims;
      std::vector<std::pair<ResonantPoint, int>> chosen;
      for (int i = 0; i <= k; ++i) {
        const int ti = t + i * k_stride;
        t_last = std::max(t_last, ti);
        std::int64_t cc = 0;
        auto G = G_of(b, ti, &cc);
        if (!G)
          throw CantorError("ubiquity failure: counting estimate fails at depth " + std::to_string(n) + ", sub-level " +
                            std::to_string(i));
        Level l = level_at(p_, ti);
        const long double rho = std::exp(static_cast<long double>(l.log_rho));
        std::vector<ResonantPoint> V;
        for (const auto& R : *G) {
          bool hit = false;
          for (const auto& T : trims)
            if (std::fabs(R.x - T.c) <= rho + T.h) {
              hit = true;
              break;
            }
          if (!hit) V.push_back(R);
        }
        tree_.steps.push_back({n, i, b, static_cast<std::int64_t>(G->size()), static_cast<std::int64_t>(V.size()), cc});
        if (2 * V.size() < G->size())
          throw CantorError("#V < #G/2 at depth " + std::to_string(n) + ", sub-level " + std::to_string(i) + " (" +
                            std::to_string(V.size()) + " of " + std::to_string(G->size()) + ")");
        // h = varpi Psi^s / D
        const long double h = std::exp(static_cast<long double>(lvarpi + p_.s * l.log_Psi - lD));
        for (const auto& R : V) {
          trims.push_back({R.x, h});
          chosen.emplace_back(R, i);
        }
      }
      // mu(B') = r(B')^s / sum r^s over the local level, times mu(B)
      long double denom = 0;
      for (const auto& [R, i] : chosen) denom += std::exp(static_cast<long double>(p_.s * level_at(p_, t + i * k_stride).log_Psi));
      for (const auto& [R, i] : chosen) {
        const int ti = t + i * k_stride;
        long double w = std::exp(static_cast<long double>(p_.s * level_at(p_, ti).log_Psi)) / denom;
        push_child(b, R, ti, n, i, w * tree_.nodes[b].mu);
        gen.push_back(static_cast<std::int64_t>(tree_.nodes.size()) - 1);
      }
    }
    tree_.generations.push_back(std::move(gen));
    return t_last;
  }

  const ResonantSource& src_;
  const CantorParams& p_;
  CantorTree tree_;
};

}  // namespace

CantorTree build_cantor(const ResonantSource& src, const CantorParams& params) { return Builder(src, params).run(); }

long double cantor_measure(const CantorTree& tree, std::int64_t node) {
  if (node < 0 || node >= static_cast<std::int64_t>(tree.nodes.size()))
    throw std::out_of_range("unknown ball " + std::to_string(node));
  return tree.nodes[node].mu;
}

TreeCheck check_tree(const CantorTree& tree) {
  TreeCheck c;
  const auto& p = tree.params;
  const double lI0 = std::log(2.0 * static_cast<double>(tree.nodes[0].radius));
  for (std::size_t d = 1; d < tree.generations.size(); ++d) {
    auto gen = tree.generations[d];
    std::sort(gen.begin(), gen.end(), [&](auto a, auto b) { return tree.nodes[a].center < tree.nodes[b].center; });
    long double right = -std::numeric_limits<long double>::infinity();
    long double sum = 0, comp = 0;
    for (auto i : gen) {
      const auto& nd = tree.nodes[i];
      if (nd.center - nd.radius <= right && c.disjoint) {
        c.disjoint = false;
        c.problems.push_back("overlap at depth " + std::to_string(d));
      }
      right = std::max(right, nd.center + nd.radius);
      const auto& par = tree.nodes[nd.parent];
      if (std::fabs(nd.center - par.center) + nd.radius > par.radius && c.nested) {
        c.nested = false;
        c.problems.push_back("ball " + std::to_string(i) + " not inside its parent");
      }
      // Kahan sum of the weights
      long double y = nd.mu - comp, t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      const double log_rs = p.s * nd.log2radius * std::log(2.0);
      const double lmu = std::log(static_cast<double>(nd.mu));
      const double bink = lmu - (std::log(2.0) + log_rs - lI0 - std::log(p.eta));
      c.worst_bink_ratio = std::max(c.worst_bink_ratio, std::exp(bink));
      if (bink > 1e-12 && c.bink) {
        c.bink = false;
        c.problems.push_back("mass bound fails at ball " + std::to_string(i));
      }
      if (tree.branch == CantorBranch::Infinite && lmu > log_rs - std::log(p.eta) + 1e-12 && c.infinite_bound) {
        c.infinite_bound = false;
        c.problems.push_back("mu(B) > r(B)^s / eta at ball " + std::to_string(i));
      }
    }
    c.max_mass_error = std::max(c.max_mass_error, static_cast<double>(std::fabs(sum - 1.0L)));
  }
  if (c.max_mass_error > 1e-12) c.problems.push_back("generation mass drifts from 1");
  return c;
}

MassDistributionReport mass_distribution_check(const CantorTree& tree, double s, const MassDistributionOptions& opt) {
  if (tree.depth() < 1) throw std::invalid_argument("tree has no levels");
  MassDistributionReport rep;
  rep.reference = 3.0 / (tree.params.c1 * tree.params.eta);
  auto deep = tree.generations.back();
  std::sort(deep.begin(), deep.end(), [&](auto a, auto b) { return tree.nodes[a].center < tree.nodes[b].center; });
  std::vector<long double> cs, rs, mus;
  long double rmax = 0;
  double l2min = std::numeric_limits<double>::infinity();
  for (auto i : deep) {
    cs.push_back(tree.nodes[i].center);
    rs.push_back(tree.nodes[i].radius);
    mus.push_back(tree.nodes[i].mu);
    rmax = std::max(rmax, tree.nodes[i].radius);
    l2min = std::min(l2min, tree.nodes[i].log2radius);
  }
  std::vector<double> radii = opt.log2radii;
  if (radii.empty()) {
    double l2max = -std::numeric_limits<double>::infinity();
    for (auto i : tree.generations[1]) l2max = std::max(l2max, tree.nodes[i].log2radius);
    const int K = 32;
    for (int k = 0; k < K; ++k) radii.push_back(l2max + (l2min - l2max) * k / (K - 1));
  }
  std::vector<long double> centers;
  std::mt19937_64 rng(opt.seed);
  const Interval I0{static_cast<double>(tree.nodes[0].center - tree.nodes[0].radius),
                    static_cast<double>(tree.nodes[0].center + tree.nodes[0].radius)};
  std::uniform_real_distribution<double> U(I0.a, I0.b);
  for (std::int64_t i = 0; i < opt.random_centers; ++i) centers.push_back(U(rng));
  if (opt.tree_centers) centers.insert(centers.end(), cs.begin(), cs.end());
  if (opt.gap_midpoints)
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) centers.push_back(0.5L * (cs[i] + cs[i + 1]));
  const auto per = static_cast<std::int64_t>(centers.size());
  if (per * static_cast<std::int64_t>(radii.size()) > opt.max_tests)
    centers.resize(static_cast<std::size_t>(std::max<std::int64_t>(1, opt.max_tests / static_cast<std::int64_t>(radii.size()))));

  const auto nr = static_cast<std::int64_t>(radii.size());
  struct Best {
    double ratio = -std::numeric_limits<double>::infinity();
    long double c = 0;
    double l2r = 0;
  };
  std::vector<Best> best(static_cast<std::size_t>(nr));
  parallel_for_index(nr, [&](std::int64_t k) {
    const long double r = std::exp2(static_cast<long double>(radii[k]));
    const double lrs = s * radii[k] * std::log(2.0);
    for (long double x : centers) {
      auto it = std::lower_bound(cs.begin(), cs.end(), x - r - rmax);
      long double mu = 0;
      for (auto j = static_cast<std::size_t>(it - cs.begin()); j < cs.size() && cs[j] <= x + r + rmax; ++j)
        if (std::fabs(cs[j] - x) <= r + rs[j]) mu += mus[j];
      if (mu <= 0) continue;
      double lr = std::log(static_cast<double>(mu)) - lrs;
      if (lr > best[k].ratio) best[k] = {lr, x, radii[k]};
    }
  });
  Best top;
  for (const auto& b : best)
    if (b.ratio > top.ratio) top = b;
  rep.tests = static_cast<std::int64_t>(centers.size()) * nr;
  rep.max_ratio = std::exp(top.ratio);
  rep.implied_bound = rep.max_ratio > 0 ? 1.0 / rep.max_ratio : std::numeric_limits<double>::infinity();
  rep.argmax_center = top.c;
  rep.argmax_log2radius = top.l2r;
  rep.pass = rep.max_ratio <= rep.reference;
  return rep;
}

double quasi_independence_ratio(const ResonantSource& src, const LogFunction& Psi, const Schedule& schedule, int n_lo,
                                int n_hi, Interval B) {
  if (n_hi < n_lo || !(B.length() > 0)) throw std::invalid_argument("bad range for the quasi-independence ratio");
  std::vector<IntervalSet> A;
  double total = 0;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double u = schedule.u(n);
    const double r = std::exp(Psi.log(u));
    std::vector<Interval> balls;
    long double x = B.a - r;
    for (;;) {
      auto p = src.first_at_least(x, u);
      if (!p || p->x > B.b + r) break;
      balls.push_back({static_cast<double>(p->x) - r, static_cast<double>(p->x) + r});
      if (balls.size() > 20'000'000) throw std::length_error("too many balls for the quasi-independence ratio");
      x = std::nextafter(p->x, std::numeric_limits<long double>::infinity());
    }
    IntervalSet s(std::move(balls));
    s = s.intersect(IntervalSet({B}));
    total += s.measure();
    A.push_back(std::move(s));
  }
  if (total <= 0) return 0.0;
  double cross = 0;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A.size(); ++j) cross += i == j ? A[i].measure() : A[i].intersect(A[j]).measure();
  return cross / (total * total / B.length());
}

void write_tree_jsonl(const CantorTree& tree, std::ostream& out) {
  auto flags = out.flags();
  auto prec = out.precision();
  out << std::setprecision(17);
  for (const auto& n : tree.nodes)
    out << "{\"depth\":" << n.depth << ",\"center\":" << static_cast<double>(n.center)
        << ",\"log2radius\":" << n.log2radius << ",\"mu\":" << static_cast<double>(n.mu)
        << ",\"parentIndex\":" << n.parent << "}\n";
  out.flags(flags);
  out.precision(prec);
}

}  // namespace curverat
