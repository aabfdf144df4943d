#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curverat/interval_set.hpp"
#include "curverat/rational.hpp"
#include "curverat/ubiquity.hpp"

namespace curverat {

// Smallest p/q >= x with 1 <= q <= N (Stern-Brocot descent, O(log N) batched steps).
std::optional<Fraction> smallest_fraction_at_least(long double x, std::int64_t N);

// Where resonant points come from during the construction.
class ResonantSource {
 public:
  virtual ~ResonantSource() = default;
  // smallest point with x >= a and beta <= B
  virtual std::optional<ResonantPoint> first_at_least(long double a, double B) const = 0;
  virtual Interval ambient() const = 0;
  virtual double truncation() const = 0;
  virtual std::string describe() const = 0;
};

// Every reduced p/q in the ambient interval, beta = q, no truncation.
class FareySource final : public ResonantSource {
 public:
  explicit FareySource(Interval ambient = {0.0, 1.0}) : ambient_(ambient) {}
  std::optional<ResonantPoint> first_at_least(long double a, double B) const override;
  Interval ambient() const override { return ambient_; }
  double truncation() const override;
  std::string describe() const override;

 private:
  Interval ambient_;
};

class SystemSource final : public ResonantSource {
 public:
  explicit SystemSource(const ResonantSystem& sys) : sys_(sys) {}
  std::optional<ResonantPoint> first_at_least(long double a, double B) const override {
    return sys_.first_at_least(a, B);
  }
  Interval ambient() const override { return sys_.ambient(); }
  double truncation() const override { return sys_.truncation(); }
  std::string describe() const override { return sys_.description(); }

 private:
  const ResonantSystem& sys_;
};

struct LogFunction {
  std::function<double(double)> log;  // natural log of the value at real u
  std::string name;
};
LogFunction log_power(double a, double c = 1.0);  // c u^-a

enum class CantorBranch { Auto, Finite, Infinite };
std::string to_string(CantorBranch b);

struct CantorParams {
  double s = 0.5;
  double eta = 4.0;
  double lambda = 0.1;                // regularity constant, must lie in (0, 1/9)
  double c1 = 0.04;                   // kappa / 24
  std::optional<double> varpi;        // defaults to c1 / 96
  int max_depth = 3;
  LogFunction rho;                    // ubiquity function
  LogFunction Psi;                    // approximating radius
  Schedule schedule{std::sqrt(2.0)};  // u_n = base^n
  CantorBranch branch = CantorBranch::Auto;
  int t_max = 400;                    // largest schedule index scanned for t_n
  int max_sublevels = 8;              // finite branch: cap on k_n(B) + 1
  std::int64_t max_nodes = 2'000'000;
  int g_probe_lo = 4, g_probe_hi = 60;  // schedule indices sampled to measure G

  double varpi_value() const { return varpi.value_or(c1 / 96.0); }
};

// rho = u^-2, Psi = u^-tau on the rationals of [0, 1]
CantorParams toy_params(double tau, double s, double eta);

struct CantorNode {
  int depth = 0;        // 0 is the root I_0
  int sublevel = 0;     // i in K(t_n + i, B)
  int t = 0;            // schedule index of the radius
  long double center = 0.0L;
  long double radius = 0.0L;  // 0 once below long double range; log2radius is authoritative
  double log2radius = 0.0;
  double beta = 0.0;
  std::int64_t parent = -1;
  long double mu = 1.0L;
};

struct SelectionStep {
  int depth = 0;
  int sublevel = 0;
  std::int64_t parent = 0;
  std::int64_t G = 0;  // #G_B(t_n + i)
  std::int64_t V = 0;  // #V_B(t_n + i)
  std::int64_t candidates = 0;  // greedy-thinned candidates in the half ball
};

struct CantorTree {
  std::vector<CantorNode> nodes;                       // nodes[0] is the root
  std::vector<std::vector<std::int64_t>> generations;  // node indices per depth, depth 0 = {0}
  std::vector<int> t;                                  // t_n per depth (index 0 unused)
  std::vector<SelectionStep> steps;
  CantorBranch branch = CantorBranch::Infinite;
  double G_slope = 0.0;   // log-log slope of g(u_n) over the probe range
  double G_star = 0.0;    // max(2, sup g) on the probe range (finite branch)
  double varpi = 0.0;
  CantorParams params;
  std::string source;

  double min_V_over_G() const;
  int depth() const { return static_cast<int>(generations.size()) - 1; }
};

struct CantorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// parameters violate a gate (eta, lambda, s, c1)
struct CantorParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

CantorTree build_cantor(const ResonantSource& src, const CantorParams& params);

// Weight of a node; throws std::out_of_range for an unknown index.
long double cantor_measure(const CantorTree& tree, std::int64_t node);

struct TreeCheck {
  bool disjoint = true;
  bool nested = true;
  double max_mass_error = 0.0;  // max |sum mu - 1| over generations
  bool bink = true;             // mu(B) <= 2 r(B)^s / (|I_0| eta) at every ball
  bool infinite_bound = true;   // mu(B) <= r(B)^s / eta (infinite branch only)
  double worst_bink_ratio = 0.0;  // max mu(B) |I_0| eta / (2 r(B)^s)
  std::vector<std::string> problems;
  bool ok() const { return disjoint && nested && max_mass_error <= 1e-12 && bink && infinite_bound; }
};
TreeCheck check_tree(const CantorTree& tree);

struct MassDistributionOptions {
  std::vector<double> log2radii;  // default: 32 values from the level-1 radius to the deepest radius
  std::int64_t random_centers = 10000;
  std::uint64_t seed = 1;
  bool tree_centers = true;
  bool gap_midpoints = true;
  std::int64_t max_tests = 4'000'000;
};

struct MassDistributionReport {
  double max_ratio = 0.0;       // max mu(A) / r(A)^s
  double implied_bound = 0.0;   // 1 / max_ratio
  double reference = 0.0;       // 3 / (c1 eta)
  bool pass = false;            // max_ratio <= reference
  long double argmax_center = 0.0L;
  double argmax_log2radius = 0.0;
  std::int64_t tests = 0;
};
MassDistributionReport mass_distribution_check(const CantorTree& tree, double s, const MassDistributionOptions& opt = {});

// Sum_{s,t} |A_s cap A_t| / ((Sum_s |A_s|)^2 / |B|) with A_n the union of B(R, Psi(u_n)) over beta <= u_n, inside B.
double quasi_independence_ratio(const ResonantSource& src, const LogFunction& Psi, const Schedule& schedule, int n_lo,
                                int n_hi, Interval B);

// One node per line: {"depth","center","log2radius","mu","parentIndex"}
void write_tree_jsonl(const CantorTree& tree, std::ostream& out);

}  // namespace curverat
