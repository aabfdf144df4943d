#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "curverat/cantor.hpp"
#include "curverat/cli/cli.hpp"
#include "curverat/cli/criteria.hpp"
#include "curverat/counting.hpp"
#include "curverat/dimension.hpp"
#include "curverat/parallel.hpp"
#include "curverat/quadrics.hpp"
#include "curverat/sieve.hpp"
#include "curverat/ubiquity.hpp"
#include "io.hpp"

namespace curverat::cli {

#ifndef CURVERAT_VERSION
#define CURVERAT_VERSION "0.0.0"
#endif

std::string version() { return CURVERAT_VERSION; }

namespace {

namespace fs = std::filesystem;

struct Outputs {
  std::string json, csv, jsonl, manifest;
};

ojson interval_json(Interval I) { return ojson::array({I.a, I.b}); }

ojson point_json(const RationalPoint& p) { return ojson::array({p.p1, p.p2, p.q}); }

ojson precondition_json(const PreconditionCheck& c) {
  ojson j;
  j["ok"] = c.ok;
  j["reason"] = c.reason;
  return j;
}

ojson verdict_json(const Verdict& v) {
  ojson j;
  j["classification"] = to_string(v.classification);
  j["series"] = to_string(v.series);
  j["theorem"] = v.theorem;
  j["conjectural"] = v.conjectural;
  j["symbolic"] = v.symbolic;
  j["exponent_a"] = v.exponent_a ? ojson(*v.exponent_a) : ojson(nullptr);
  j["exponent_b"] = v.exponent_b ? ojson(*v.exponent_b) : ojson(nullptr);
  ojson ps = ojson::array();
  for (auto [h, s] : v.partial_sums) ps.push_back(ojson::array({h, s}));
  j["partial_sums"] = ps;
  j["failed_preconditions"] = v.failed_preconditions;
  j["reason"] = v.reason;
  return j;
}

// Collects the parameter echo, writes outputs and the manifest.
class Session {
 public:
  Session(std::string command, std::vector<std::string> argv, const Outputs& o, std::ostream& out)
      : command_(std::move(command)), argv_(std::move(argv)), o_(o), out_(out), start_(clock::now()) {}

  ojson params = ojson::object();

  void echo() {
    params_hash_ = sha256_hex(params.dump()).substr(0, 16);
    out_ << "params " << params.dump() << "\n";
  }

  void sieve(const SieveTable& t) {
    sieve_key_ = SieveTable::cache_file_name(t.n_max(), t.has_divisors());
    sieve_cached_ = t.loaded_from_cache();
  }

  SieveTable build_sieve(std::uint64_t n_max, bool divisors, const SieveOptions& base) {
    SieveOptions so = base;
    so.with_divisors = divisors;
    SieveTable t = SieveTable::build(n_max, so);
    sieve(t);
    return t;
  }

  // Writes the results document, optional csv and jsonl, then prints the results (or a pointer to them).
  void emit(const ojson& results, const Csv* csv = nullptr, const std::string* jsonl = nullptr) {
    ojson doc;
    doc["schema"] = "curverat." + schema_name() + "/1";
    doc["params"] = params;
    doc["results"] = results;
    if (!o_.json.empty()) write(o_.json, "json", doc.dump(2) + "\n");
    if (!o_.csv.empty()) {
      if (!csv) throw UsageError("--csv is not supported by '" + command_ + "'");
      write(o_.csv, "csv", csv->str(params_hash_));
    }
    if (!o_.jsonl.empty()) {
      if (!jsonl) throw UsageError("--jsonl is not supported by '" + command_ + "'");
      write(o_.jsonl, "jsonl", *jsonl);
    }
    std::string text = results.dump(2);
    if (text.size() <= 20000 || o_.json.empty()) {
      out_ << "results " << text << "\n";
    } else {
      out_ << "results written to " << o_.json << "\n";
    }
    finish();
  }

 private:
  using clock = std::chrono::steady_clock;

  std::string schema_name() const {
    std::string s = command_;
    std::replace(s.begin(), s.end(), ' ', '.');
    return s;
  }

  void write(const std::string& path, const std::string& kind, const std::string& content) {
    write_file(path, content);
    ojson e;
    e["path"] = path;
    e["kind"] = kind;
    e["sha256"] = sha256_hex(content);
    outputs_.push_back(e);
  }

  void finish() {
    std::string path = o_.manifest;
    if (path.empty() && !outputs_.empty()) path = outputs_.front()["path"].get<std::string>() + ".manifest.json";
    if (path.empty()) return;
    double wall = std::chrono::duration<double>(clock::now() - start_).count();
    ojson m;
    m["params"] = params;
    m["schema"] = "curverat.manifest/1";
    m["subcommand"] = command_;
    m["argv"] = argv_;
    m["version"] = version();
    m["sieve_cache_key"] = sieve_key_.empty() ? ojson(nullptr) : ojson(sieve_key_);
    m["sieve_from_cache"] = sieve_cached_;
    m["threads"] = default_threads();
    m["wall_seconds"] = wall;
    m["outputs"] = outputs_;
    write_file(path, m.dump(2) + "\n");
    out_ << "manifest " << path << "\n";
  }

  std::string command_;
  std::vector<std::string> argv_;
  Outputs o_;
  std::ostream& out_;
  clock::time_point start_;
  std::string params_hash_;
  std::string sieve_key_;
  bool sieve_cached_ = false;
  ojson outputs_ = ojson::array();
};

void add_outputs(CLI::App* sc, Outputs& o, bool csv, bool jsonl) {
  sc->add_option("--json", o.json, "write the results document here");
  if (csv) sc->add_option("--csv", o.csv, "write a CSV table here");
  if (jsonl) sc->add_option("--jsonl", o.jsonl, "write one JSON object per line here");
  sc->add_option("--manifest", o.manifest, "manifest path (default: first output + .manifest.json)");
}

// sieve size that covers every n with sqrt n <= c + w, c <= cmax
std::uint64_t cover_square(double cmax_plus_width) {
  double v = std::ceil(cmax_plus_width) + 1.0;
  return static_cast<std::uint64_t>(v * v);
}

std::uint64_t wm_sieve_size(QuadricKind kind, const ApproximatingFunction& Psi, int m, int k) {
  double P = Psi(1);
  double Q2 = std::ldexp(1.0, m + 1);
  double a = std::ldexp(1.0, k + 1);
  switch (kind) {
    case QuadricKind::UnitCircle:
    case QuadricKind::CircleRadiusSqrt3: return cover_square(Q2 + 4 * P);
    case QuadricKind::Hyperbola: return cover_square(a * Q2 + 8 * P);
    case QuadricKind::Parabola: return cover_square(2 * a * a * Q2 + 48 * P);
  }
  return 0;
}

CantorBranch parse_branch(const std::string& s) {
  if (s == "auto") return CantorBranch::Auto;
  if (s == "finite") return CantorBranch::Finite;
  if (s == "infinite") return CantorBranch::Infinite;
  throw UsageError("branch must be auto, finite or infinite");
}

double parse_base(const std::string& s) {
  if (s == "sqrt2") return std::sqrt(2.0);
  try {
    double b = std::stod(s);
    if (b > 1.0) return b;
  } catch (const std::exception&) {
  }
  throw UsageError("schedule base must be > 1 or 'sqrt2'");
}

RationalAffine parse_affine(const std::string& s) {
  auto v = parse_int_list(s);
  if (v.size() != 7) throw UsageError("transform needs a11,a12,a21,a22,c1,c2,D");
  RationalAffine T;
  T.A = {v[0], v[1], v[2], v[3]};
  T.c = {v[4], v[5]};
  T.D = v[6];
  if (!T.invertible()) throw UsageError("transform is not invertible");
  return T;
}

struct CantorArgs {
  double tau = 2.2, s = 0.1, c1 = 0.04, lambda = 0.1;
  std::optional<double> varpi;
  int depth = 3, t_max = 400, max_sublevels = 8;
  std::string base = "sqrt2", branch = "auto";
  std::int64_t max_nodes = 2'000'000;
  std::string interval = "0,1";

  void add(CLI::App* sc) {
    sc->add_option("--tau", tau, "Psi(u) = u^-tau");
    sc->add_option("--s", s, "target exponent");
    sc->add_option("--c1", c1, "coverage constant");
    sc->add_option("--lambda", lambda, "regularity constant");
    sc->add_option("--varpi", varpi, "finite-branch constant (default c1/96)");
    sc->add_option("--depth", depth, "levels to build");
    sc->add_option("--base", base, "schedule base, a number > 1 or sqrt2");
    sc->add_option("--branch", branch, "auto | finite | infinite");
    sc->add_option("--t-max", t_max);
    sc->add_option("--max-sublevels", max_sublevels);
    sc->add_option("--max-nodes", max_nodes);
    sc->add_option("--interval", interval, "ambient interval a,b");
  }

  CantorParams params(double eta) const {
    CantorParams p = toy_params(tau, s, eta);
    p.c1 = c1;
    p.lambda = lambda;
    p.varpi = varpi;
    p.max_depth = depth;
    p.schedule = Schedule{parse_base(base)};
    p.branch = parse_branch(branch);
    p.t_max = t_max;
    p.max_sublevels = max_sublevels;
    p.max_nodes = max_nodes;
    return p;
  }

  void echo(ojson& j) const {
    j["source"] = "farey";
    j["interval"] = interval_json(parse_interval(interval));
    j["rho"] = "u^-2";
    j["Psi"] = "u^-" + fmt17(tau);
    j["tau"] = tau;
    j["s"] = s;
    j["c1"] = c1;
    j["lambda"] = lambda;
    j["varpi"] = varpi ? ojson(*varpi) : ojson(nullptr);
    j["depth"] = depth;
    j["base"] = base;
    j["branch"] = branch;
    j["t_max"] = t_max;
    j["max_sublevels"] = max_sublevels;
    j["max_nodes"] = max_nodes;
  }
};

ojson tree_json(const CantorTree& tree, const TreeCheck& chk) {
  ojson j;
  j["branch"] = to_string(tree.branch);
  j["G_slope"] = tree.G_slope;
  j["G_star"] = tree.G_star;
  j["varpi"] = tree.varpi;
  j["depth"] = tree.depth();
  ojson gens = ojson::array();
  for (const auto& g : tree.generations) gens.push_back(g.size());
  j["generation_sizes"] = gens;
  j["t"] = ojson(std::vector<int>(tree.t.begin() + (tree.t.empty() ? 0 : 1), tree.t.end()));
  j["min_V_over_G"] = tree.min_V_over_G();
  ojson c;
  c["disjoint"] = chk.disjoint;
  c["nested"] = chk.nested;
  c["max_mass_error"] = chk.max_mass_error;
  c["bink"] = chk.bink;
  c["infinite_bound"] = chk.infinite_bound;
  c["worst_bink_ratio"] = chk.worst_bink_ratio;
  c["problems"] = chk.problems;
  c["ok"] = chk.ok();
  j["check"] = c;
  return j;
}

ojson theorem4_rows(Session& S, const PlanarCurve& curve, const ApproximatingFunction& psi,
                    const std::vector<std::int64_t>& Qs, Interval I, double delta0, double C1, bool bisect, Csv& csv,
                    bool& pass) {
  ojson rows = ojson::array();
  double lo = INFINITY, hi = 0.0;
  bool all = true;
  for (auto Q : Qs) {
    ojson r;
    r["Q"] = Q;
    if (bisect) {
      auto b = theorem4_bisect_c1(curve, psi, Q, I, delta0);
      r["C1_star"] = b.C1_star ? ojson(*b.C1_star) : ojson(nullptr);
      r["fraction"] = b.fraction;
      r["count"] = b.count;
      r["iterations"] = b.iterations;
      r["precondition"] = precondition_json(b.precondition);
      csv.row().add(Q).add(b.C1_star.value_or(NAN)).add(b.fraction).add(b.count).add(b.C1_star.has_value());
      if (b.C1_star) {
        lo = std::min(lo, *b.C1_star);
        hi = std::max(hi, *b.C1_star);
      } else {
        all = false;
      }
    } else {
      auto t = theorem4_verify(curve, psi, Q, I, C1, delta0);
      r["C1"] = t.C1;
      r["radius"] = t.radius;
      r["count"] = t.count;
      r["fraction"] = t.fraction;
      r["pass"] = t.pass;
      r["precondition"] = precondition_json(t.precondition);
      csv.row().add(Q).add(t.C1).add(t.fraction).add(t.count).add(t.pass);
      all = all && t.pass;
    }
    rows.push_back(r);
  }
  ojson res;
  res["rows"] = rows;
  if (bisect) {
    double spread = all && lo > 0 ? hi / lo : INFINITY;
    res["C1_star_spread"] = std::isfinite(spread) ? ojson(spread) : ojson(nullptr);
    pass = all && spread < 4.0;
  } else {
    pass = all;
  }
  res["pass"] = pass;
  (void)S;
  return res;
}

std::string remap(const std::string& path, const fs::path& dir) { return (dir / fs::path(path).filename()).string(); }

int replay(const std::string& manifest_path, std::string into, std::ostream& out, std::ostream& err) {
  ojson m;
  try {
    m = ojson::parse(read_file(manifest_path));
  } catch (const ojson::parse_error& e) {
    throw UsageError(std::string("manifest is not JSON: ") + e.what());
  }
  if (!m.contains("argv") || !m.contains("outputs")) throw UsageError("manifest lacks argv or outputs");
  fs::path dir = into.empty() ? fs::path(manifest_path).parent_path() / "replay" : fs::path(into);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  static const std::vector<std::string> path_opts{"--json", "--csv", "--jsonl", "--manifest"};
  std::vector<std::string> args = m["argv"].get<std::vector<std::string>>();
  bool has_manifest = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    for (const auto& o : path_opts) {
      if (args[i] == o && i + 1 < args.size()) {
        args[i + 1] = remap(args[i + 1], dir);
        has_manifest = has_manifest || o == "--manifest";
      } else if (args[i].rfind(o + "=", 0) == 0) {
        args[i] = o + "=" + remap(args[i].substr(o.size() + 1), dir);
        has_manifest = has_manifest || o == "--manifest";
      }
    }
  }
  (void)has_manifest;
  std::ostringstream sub_out;
  int rc = run(args, sub_out, err);
  out << "replayed " << m.value("subcommand", std::string("?")) << " into " << dir.string() << " (exit " << rc << ")\n";
  bool ok = rc == kOk;
  for (const auto& o : m["outputs"]) {
    std::string p = remap(o["path"].get<std::string>(), dir);
    std::string want = o["sha256"].get<std::string>();
    std::string got = sha256_file(p);
    bool same = got == want;
    ok = ok && same;
    out << (same ? "match    " : "MISMATCH ") << o["path"].get<std::string>() << " " << got << "\n";
  }
  out << (ok ? "replay identical\n" : "replay differs\n");
  return ok ? kOk : kAssertion;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"curverat: rational points near planar curves", "curverat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  int threads = 0;
  std::string cache_dir;
  bool no_cache = false;
  app.add_option("--threads", threads, "worker threads (default: hardware parallelism)");
  app.add_option("--cache-dir", cache_dir, "sieve cache directory (default: CURVE_RATIONALS_CACHE_DIR)");
  app.add_flag("--no-cache", no_cache, "never read or write the sieve cache");

  Outputs o;

  // count
  auto* c_count = app.add_subcommand("count", "count rational points near a curve");
  std::string curve_s = "parabola", psi_s = "pow:1", interval_s = "0,1", series_s;
  std::int64_t Q = 0;
  std::optional<std::int64_t> floor_q;
  bool no_dedupe = false, keep_points = false;
  c_count->add_option("--curve", curve_s, "parabola | circle | circle-sqrt3 | hyperbola | cantor:D | file:path");
  c_count->add_option("--Q", Q, "denominator bound");
  c_count->add_option("--psi", psi_s, "pow:v | powlog:v,a | const:c | table:path");
  c_count->add_option("--interval", interval_s, "a,b");
  c_count->add_option("--floor", floor_q, "count only q > floor");
  c_count->add_flag("--no-dedupe", no_dedupe, "count unreduced triples too");
  c_count->add_flag("--keep-points", keep_points, "list the points");
  c_count->add_option("--series", series_s, "Q list for the ratio and Huxley series, e.g. 2^8..2^13");
  add_outputs(c_count, o, true, false);

  // sieve
  auto* c_sieve = app.add_subcommand("sieve", "r(n) sieve experiments");
  c_sieve->require_subcommand(1);
  auto* c_rn = c_sieve->add_subcommand("rn", "r(n) table, brute-force check and Gauss counts");
  std::uint64_t N = 0, from = 1, to = 0, check_max = 0;
  bool divisors = false;
  std::string gauss_s;
  c_rn->add_option("--N", N, "sieve bound")->required();
  c_rn->add_option("--from", from);
  c_rn->add_option("--to", to, "list r(n) for from <= n <= to");
  c_rn->add_option("--check", check_max, "compare with pair enumeration for n <= this");
  c_rn->add_option("--gauss", gauss_s, "x list for R(x) and the circle error");
  c_rn->add_flag("--divisors", divisors, "also sieve d(n)");
  add_outputs(c_rn, o, true, false);

  auto* c_ta = c_sieve->add_subcommand("theoremA", "sum of r(n) over n near squares");
  std::string Qlist_s, psiA_s = "pow:0.6";
  bool per_q = false;
  c_ta->add_option("--Q", Qlist_s, "Q list")->required();
  c_ta->add_option("--psi", psiA_s);
  c_ta->add_flag("--per-q", per_q, "emit the inner sum per q");
  add_outputs(c_ta, o, true, false);

  auto* c_rho = c_sieve->add_subcommand("rho", "rho(m;h) and the divisor split bounds");
  std::int64_t m_max = 10000, h_max = 10000, n_lemma = 100000, cross = 2000;
  std::optional<std::int64_t> m_one, h_one;
  c_rho->add_option("--m-max", m_max);
  c_rho->add_option("--h-max", h_max);
  c_rho->add_option("--n-max", n_lemma, "divisor split range");
  c_rho->add_option("--cross-check", cross, "compare rho with the residue histogram for m <= this");
  c_rho->add_option("--m", m_one, "single modulus");
  c_rho->add_option("--shift", h_one, "single shift h");
  add_outputs(c_rho, o, false, false);

  auto* c_as = c_sieve->add_subcommand("asympt", "sums of r(m^2) and r(q^2+1)");
  std::int64_t M = 4096;
  c_as->add_option("--M", M);
  add_outputs(c_as, o, true, false);

  // ubiquity
  auto* c_ub = app.add_subcommand("ubiquity", "ubiquitous systems");
  c_ub->require_subcommand(1);
  auto* c_cov = c_ub->add_subcommand("coverage", "covered fraction of rho-balls");
  std::string system_s = "rationals", rho_s = "cor7:log", psiU_s = "pow:0.75", intervalU_s = "0,1";
  int n_lo = 1, n_hi = 10;
  double base = 2.0;
  std::optional<std::int64_t> B;
  c_cov->add_option("--system", system_s, "rationals, or a curve id for its near-curve system");
  c_cov->add_option("--psi", psiU_s, "psi of the curve system, also inside cor7");
  c_cov->add_option("--rho", rho_s, "cor7:log2p|loglog|log|staircase | pow:a[,c]");
  c_cov->add_option("--n-lo", n_lo);
  c_cov->add_option("--n-hi", n_hi);
  c_cov->add_option("--base", base, "schedule u_n = base^n");
  c_cov->add_option("--B", B, "truncation (default ceil(base^n_hi))");
  c_cov->add_option("--interval", intervalU_s);
  add_outputs(c_cov, o, true, false);

  auto* c_t4 = c_ub->add_subcommand("theorem4", "coverage by the points of A_Q(I)");
  std::string curve4_s = "parabola", psi4_s = "pow:0.75", Q4_s = "2^8..2^12", interval4_s = "0,1";
  double delta0 = 0.01, C1 = 1.0;
  bool bisect = false;
  for (auto* sc : {c_t4}) {
    sc->add_option("--curve", curve4_s);
    sc->add_option("--psi", psi4_s);
    sc->add_option("--Q", Q4_s, "Q list");
    sc->add_option("--interval", interval4_s);
    sc->add_option("--delta0", delta0);
    sc->add_option("--C1", C1);
    sc->add_flag("--bisect-c1", bisect, "search the minimal C1 reaching fraction 1/2");
  }
  add_outputs(c_t4, o, true, false);

  auto* c_bk = c_ub->add_subcommand("bikt", "measure of the nondivergence set");
  std::string curveB_s = "parabola", intervalB_s = "0,1", deltas_s = "1e-1,1e-2,1e-3,1e-4";
  double K = 1.0, T = 1.0;
  std::int64_t grid = 100000;
  c_bk->add_option("--curve", curveB_s);
  c_bk->add_option("--interval", intervalB_s);
  c_bk->add_option("--delta", deltas_s, "delta list");
  c_bk->add_option("--K", K);
  c_bk->add_option("--T", T);
  c_bk->add_option("--grid", grid);
  add_outputs(c_bk, o, true, false);

  // cantor
  auto* c_ca = app.add_subcommand("cantor", "Cantor-type construction");
  c_ca->require_subcommand(1);
  CantorArgs ca;
  auto* c_build = c_ca->add_subcommand("build", "build the tree and check it");
  double eta = 16.0;
  ca.add(c_build);
  c_build->add_option("--eta", eta);
  add_outputs(c_build, o, false, true);

  auto* c_md = c_ca->add_subcommand("massdist", "mass distribution check over eta values");
  std::string etas_s = "4,16,64";
  std::int64_t random_centers = 10000;
  std::uint64_t seed = 1;
  ca.add(c_md);
  c_md->add_option("--eta", etas_s, "eta list");
  c_md->add_option("--random", random_centers, "random test centers");
  c_md->add_option("--seed", seed);
  add_outputs(c_md, o, true, false);

  // dimension
  auto* c_dim = app.add_subcommand("dimension", "classifiers and dimension estimates");
  c_dim->require_subcommand(1);
  auto* c_cl = c_dim->add_subcommand("classify", "series and limit classifiers");
  std::string kind_s = "khintchine", psiD_s = "pow:0.75", h_s;
  int nD = 2;
  std::optional<double> sD, kD, eD;
  std::int64_t hmax = 1 << 20;
  c_cl->add_option("--kind", kind_s, "khintchine | jarnik | jarnik-curve | general | series | limit");
  c_cl->add_option("--psi", psiD_s);
  c_cl->add_option("--n", nD, "ambient dimension");
  c_cl->add_option("--s", sD, "Hausdorff exponent");
  c_cl->add_option("--hfun", h_s, "dimension function pow:s | powlog:s,k");
  c_cl->add_option("--k", kD, "series/limit: power of h");
  c_cl->add_option("--e", eD, "series/limit: power of psi");
  c_cl->add_option("--hmax", hmax);
  add_outputs(c_cl, o, false, false);

  auto* c_pr = c_dim->add_subcommand("predict", "predicted dimension");
  std::optional<std::string> psiP;
  std::optional<double> lambda, vP;
  std::string quadricP;
  c_pr->add_option("--psi", psiP);
  c_pr->add_option("--lambda", lambda);
  c_pr->add_option("--quadric", quadricP, "circle | circle-sqrt3 | hyperbola | parabola, with --v");
  c_pr->add_option("--v", vP);
  add_outputs(c_pr, o, false, false);

  auto* c_bd = c_dim->add_subcommand("boxdim", "box-counting estimate");
  std::string curveX_s = "parabola", psiX_s = "pow:0.75", intervalX_s = "0,1", exps_s = "8..18";
  double band = 2.0;
  c_bd->add_option("--curve", curveX_s);
  c_bd->add_option("--psi", psiX_s);
  c_bd->add_option("--interval", intervalX_s);
  c_bd->add_option("--delta-exp", exps_s, "k list, delta = 2^-k");
  c_bd->add_option("--band", band, "denominators in (Q/band, Q]");
  add_outputs(c_bd, o, true, false);

  // quadric
  auto* c_q = app.add_subcommand("quadric", "rational quadrics");
  c_q->require_subcommand(1);
  auto* c_pts = c_q->add_subcommand("points", "exact rational points");
  std::string qkind_s = "circle", window_s, transform_s;
  std::int64_t Qmax = 50;
  c_pts->add_option("--kind", qkind_s, "circle | circle-sqrt3 | hyperbola | parabola");
  c_pts->add_option("--Qmax", Qmax);
  c_pts->add_option("--window", window_s, "x window a,b");
  c_pts->add_option("--transform", transform_s, "a11,a12,a21,a22,c1,c2,D");
  add_outputs(c_pts, o, true, false);

  auto* c_wm = c_q->add_subcommand("wm", "dyadic square families");
  std::string Psi_s = "const:0.3", ms_s = "1..8";
  int kW = 1;
  bool no_squares = false, keep_squares = false;
  c_wm->add_option("--kind", qkind_s);
  c_wm->add_option("--Psi", Psi_s);
  c_wm->add_option("--m", ms_s, "m list");
  c_wm->add_option("--k", kW, "window |x1| <= 2^k");
  c_wm->add_flag("--no-squares", no_squares, "skip square enumeration");
  c_wm->add_flag("--keep-squares", keep_squares);
  add_outputs(c_wm, o, true, false);

  auto* c_tl = c_q->add_subcommand("tails", "dyadic Borel-Cantelli tails");
  std::string psiT_s = "pow:0.6";
  std::optional<double> sT;
  int m_lo = 1, m_hi = 40, wm_max = 0;
  c_tl->add_option("--kind", qkind_s);
  c_tl->add_option("--psi", psiT_s);
  c_tl->add_option("--s", sT, "Hausdorff exponent; measure case when absent");
  c_tl->add_option("--m-lo", m_lo);
  c_tl->add_option("--m-hi", m_hi);
  c_tl->add_option("--wm-max-m", wm_max, "fill W_m columns up to this m");
  add_outputs(c_tl, o, true, false);

  // verify
  auto* c_v = app.add_subcommand("verify", "acceptance checks");
  std::string vname = "all";
  c_v->add_option("name", vname, "all, a criterion name or number");
  std::optional<std::string> vQ;
  c_v->add_option("--curve", curve4_s);
  c_v->add_option("--psi", psi4_s);
  c_v->add_option("--Q", vQ, "theorem4: Q list");
  c_v->add_option("--interval", interval4_s);
  c_v->add_option("--delta0", delta0);
  c_v->add_option("--C1", C1);
  c_v->add_flag("--bisect-c1", bisect);
  add_outputs(c_v, o, false, false);

  // replay
  auto* c_rp = app.add_subcommand("replay", "rerun a manifest and compare digests");
  std::string manifest_in, into;
  c_rp->add_option("manifest", manifest_in)->required();
  c_rp->add_option("--into", into, "directory for the replayed outputs (default: <manifest dir>/replay)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (threads > 0) set_default_threads(threads);
    SieveOptions so;
    so.cache_dir = cache_dir;
    so.use_cache = !no_cache;

    auto session = [&](const std::string& name) { return Session(name, args, o, out); };

    if (c_count->parsed()) {
      Session S = session("count");
      PlanarCurve curve = parse_curve(curve_s);
      auto psi = parse_psi(psi_s);
      Interval I = parse_interval(interval_s);
      S.params["curve"] = curve.id();
      S.params["psi"] = psi.describe();
      S.params["interval"] = interval_json(I);
      if (!series_s.empty()) {
        auto Qs = parse_int_list(series_s);
        S.params["Q"] = Qs;
        S.echo();
        auto ratio = theorem3_ratio_series(curve, psi, I, Qs);
        auto hux = huxley_probe(curve, psi, I, Qs);
        ojson rows = ojson::array();
        Csv csv({"Q", "count", "ratio", "huxley_exponent", "huxley_excess"});
        for (std::size_t i = 0; i < Qs.size(); ++i) {
          const auto& r = ratio.points[i];
          const auto& h = hux.points[i];
          ojson row;
          row["Q"] = r.Q;
          row["count"] = r.count;
          row["ratio"] = r.value;
          row["huxley_exponent"] = h.value;
          row["huxley_excess"] = h.excess ? ojson(*h.excess) : ojson(nullptr);
          rows.push_back(row);
          csv.row().add(r.Q).add(r.count).add(r.value).add(h.value).add(h.excess.value_or(NAN));
        }
        ojson res;
        res["rows"] = rows;
        res["precondition"] = precondition_json(ratio.precondition);
        S.emit(res, &csv);
        return kOk;
      }
      if (Q < 1) throw UsageError("count needs --Q >= 1 or --series");
      S.params["Q"] = Q;
      S.params["floor"] = floor_q ? ojson(*floor_q) : ojson(nullptr);
      S.params["dedupe"] = !no_dedupe;
      S.params["keep_points"] = keep_points;
      S.echo();
      NearCurveQuery qy{curve, Q, psi, I, floor_q, !no_dedupe, keep_points || !o.csv.empty(), 0};
      auto rep = enumerate_near_curve(qy);
      ojson res;
      res["count"] = rep.count;
      res["threshold"] = rep.threshold;
      res["psi_Q"] = rep.psi_Q;
      res["huxley_ratio"] = rep.huxley_ratio;
      res["uncertain"] = rep.uncertain;
      res["exact_rechecks"] = rep.exact_rechecks;
      res["exact_fixture"] = rep.exact_fixture;
      Csv csv({"p1", "p2", "q", "x", "y"});
      for (const auto& p : rep.points) csv.row().add(p.p1).add(p.p2).add(p.q).add(p.x()).add(p.y());
      if (keep_points) {
        ojson pts = ojson::array();
        for (const auto& p : rep.points) pts.push_back(point_json(p));
        res["points"] = pts;
      }
      S.emit(res, &csv);
      return kOk;
    }

    if (c_rn->parsed()) {
      Session S = session("sieve rn");
      if (N < 1) throw UsageError("--N must be >= 1");
      if (to > N) throw UsageError("--to exceeds --N");
      if (to > 0 && to - std::min(from, to) > 10'000'000) throw UsageError("listing limited to 10^7 rows");
      std::vector<double> xs = gauss_s.empty() ? std::vector<double>{} : parse_double_list(gauss_s);
      S.params["N"] = N;
      S.params["from"] = from;
      S.params["to"] = to;
      S.params["check"] = check_max;
      S.params["gauss"] = xs;
      S.params["divisors"] = divisors;
      S.echo();
      SieveTable t = S.build_sieve(N, divisors, so);
      ojson res;
      res["N"] = N;
      if (check_max > 0) {
        std::uint64_t lim = std::min(check_max, N), bad = 0;
        for (std::uint64_t n = 0; n <= lim; ++n) bad += t.r(n) != r_bruteforce(n);
        res["checked"] = lim;
        res["discrepancies"] = bad;
      }
      ojson g = ojson::array();
      for (double x : xs) {
        if (x > static_cast<double>(N)) throw UsageError("gauss x beyond --N");
        auto gc = gauss_count(x, t);
        ojson e;
        e["x"] = x;
        e["R"] = gc.R;
        e["delta"] = gc.delta;
        e["delta0"] = gc.delta0;
        e["delta_over_cbrt"] = x > 0 ? std::abs(gc.delta) / std::cbrt(x) : 0.0;
        g.push_back(e);
      }
      res["gauss"] = g;
      Csv csv(divisors ? std::vector<std::string>{"n", "r", "d"} : std::vector<std::string>{"n", "r"});
      for (std::uint64_t n = from; to > 0 && n <= to; ++n) {
        csv.row().add(static_cast<std::int64_t>(n)).add(t.r(n));
        if (divisors) csv.add(static_cast<std::int64_t>(t.d(n)));
      }
      S.emit(res, &csv);
      if (check_max > 0 && res["discrepancies"].get<std::uint64_t>() > 0) return kAssertion;
      return kOk;
    }

    if (c_ta->parsed()) {
      Session S = session("sieve theoremA");
      auto Qs = parse_double_list(Qlist_s);
      auto psi = parse_psi(psiA_s);
      S.params["Q"] = Qs;
      S.params["psi"] = psi.describe();
      S.params["per_q"] = per_q;
      S.echo();
      double qmax = *std::max_element(Qs.begin(), Qs.end());
      if (qmax < 1) throw UsageError("Q must be >= 1");
      SieveTable t = S.build_sieve(cover_square(2 * qmax + psi(1)), false, so);
      ojson rows = ojson::array();
      Csv csv(per_q ? std::vector<std::string>{"Q", "q", "inner"}
                    : std::vector<std::string>{"Q", "exact_sum", "main_term", "ratio", "tie_count"});
      for (double q : Qs) {
        auto r = sum_r_near_squares(q, psi, t, per_q);
        ojson row;
        row["Q"] = r.Q;
        row["q_first"] = r.q_first;
        row["q_last"] = r.q_last;
        row["exact_sum"] = r.exact_sum;
        row["main_term"] = r.main_term;
        row["ratio"] = r.ratio;
        row["distance_to_1"] = std::abs(r.ratio - 1.0);
        row["suggested_N"] = r.suggested_N;
        row["tie_count"] = r.tie_count;
        row["tie_uncertain"] = r.tie_uncertain;
        row["exact_ties"] = r.exact_ties;
        rows.push_back(row);
        if (per_q) {
          for (auto [qq, v] : r.per_q) csv.row().add(q).add(qq).add(v);
        } else {
          csv.row().add(q).add(r.exact_sum).add(r.main_term).add(r.ratio).add(r.tie_count);
        }
      }
      ojson res;
      res["rows"] = rows;
      S.emit(res, &csv);
      return kOk;
    }

    if (c_rho->parsed()) {
      Session S = session("sieve rho");
      ojson res;
      if (m_one) {
        std::int64_t h = h_one.value_or(0);
        if (*m_one < 1) throw UsageError("--m must be >= 1");
        S.params["m"] = *m_one;
        S.params["h"] = h;
        S.echo();
        SieveTable t = S.build_sieve(std::max<std::uint64_t>(1000, static_cast<std::uint64_t>(*m_one)), true, so);
        auto m = static_cast<std::uint64_t>(*m_one);
        res["rho"] = rho_congruence(m, h, &t);
        res["rho_bruteforce"] = rho_bruteforce(m, h);
        res["bound"] = rho_bound(m, h, t);
        res["holds"] = res["rho"].get<std::int64_t>() <= res["bound"].get<std::int64_t>();
        S.emit(res);
        return res["holds"].get<bool>() ? kOk : kAssertion;
      }
      S.params["m_max"] = m_max;
      S.params["h_max"] = h_max;
      S.params["n_max"] = n_lemma;
      S.params["cross_check"] = cross;
      S.echo();
      auto l1 = lemma1_scan(m_max, h_max, cross);
      auto l2 = lemma2_scan(n_lemma);
      res["lemma1"] = {{"pairs", l1.pairs},
                       {"violations", l1.violations},
                       {"rho_mismatches", l1.rho_mismatches},
                       {"first_violation", l1.first_violation}};
      res["lemma2"] = {{"checked", l2.checked}, {"violations", l2.violations}, {"first_violation", l2.first_violation}};
      S.emit(res);
      return l1.violations + l1.rho_mismatches + l2.violations == 0 ? kOk : kAssertion;
    }

    if (c_as->parsed()) {
      Session S = session("sieve asympt");
      if (M < 2) throw UsageError("--M must be >= 2");
      S.params["M"] = M;
      S.echo();
      SieveTable t = S.build_sieve(static_cast<std::uint64_t>(M) * static_cast<std::uint64_t>(M) + 1, false, so);
      auto rows = square_value_asymptotics(M, t);
      ojson jr = ojson::array();
      Csv csv({"M", "sum_r_m2", "sum_r_q2p1", "ratio_m2", "ratio_q2p1"});
      for (const auto& r : rows) {
        jr.push_back({{"M", r.M},
                      {"sum_r_m2", r.sum_r_m2},
                      {"sum_r_q2p1", r.sum_r_q2p1},
                      {"ratio_m2", r.ratio_m2},
                      {"ratio_q2p1", r.ratio_q2p1}});
        csv.row()
            .add(r.M)
            .add(static_cast<std::int64_t>(r.sum_r_m2))
            .add(static_cast<std::int64_t>(r.sum_r_q2p1))
            .add(r.ratio_m2)
            .add(r.ratio_q2p1);
      }
      ojson res;
      res["rows"] = jr;
      S.emit(res, &csv);
      return kOk;
    }

    if (c_cov->parsed()) {
      Session S = session("ubiquity coverage");
      auto psi = parse_psi(psiU_s);
      auto rho = parse_ubiquity_function(rho_s, psi);
      Interval I = parse_interval(intervalU_s);
      if (base <= 1.0) throw UsageError("--base must be > 1");
      if (n_lo > n_hi || n_lo < 0) throw UsageError("need 0 <= n-lo <= n-hi");
      Schedule sch{base};
      std::int64_t Bt = B.value_or(static_cast<std::int64_t>(std::ceil(sch.u(n_hi) - 1e-9)));
      S.params["system"] = system_s;
      if (system_s != "rationals") S.params["psi"] = psi.describe();
      S.params["rho"] = rho.describe();
      S.params["base"] = base;
      S.params["n_lo"] = n_lo;
      S.params["n_hi"] = n_hi;
      S.params["B"] = Bt;
      S.params["interval"] = interval_json(I);
      S.echo();
      ResonantSystem sys;
      ojson sj;
      if (system_s == "rationals") {
        sys = ResonantSystem::rationals(I, Bt);
      } else {
        auto cs = build_curve_system(parse_curve(system_s), psi, Bt, I);
        sys = std::move(cs.system);
        sj["exact_on_curve"] = cs.exact_on_curve ? ojson(*cs.exact_on_curve) : ojson(nullptr);
        sj["uncertain"] = cs.uncertain;
      }
      sj["size"] = sys.size();
      sj["description"] = sys.description();
      auto series = coverage_series(sys, rho, n_lo, n_hi, I, sch);
      ojson rows = ojson::array();
      Csv csv({"n", "u", "rho", "centers", "fraction"});
      for (const auto& r : series.rows) {
        rows.push_back({{"n", r.n}, {"u", r.u}, {"rho", r.rho}, {"centers", r.centers}, {"fraction", r.fraction}});
        csv.row().add(r.n).add(r.u).add(r.rho).add(r.centers).add(r.fraction);
      }
      ojson res;
      res["system"] = sj;
      res["rho_decreasing"] = rho.decreasing_on(sch, n_lo, n_hi);
      res["rows"] = rows;
      res["kappa_proxy"] = series.kappa_proxy;
      S.emit(res, &csv);
      return kOk;
    }

    auto theorem4_cmd = [&](const std::string& name, const std::string& Qs_text) {
      Session S = session(name);
      PlanarCurve curve = parse_curve(curve4_s);
      auto psi = parse_psi(psi4_s);
      Interval I = parse_interval(interval4_s);
      auto Qs = parse_int_list(Qs_text);
      if (!(delta0 > 0.0 && delta0 < 1.0)) throw UsageError("--delta0 must lie in (0, 1)");
      S.params["curve"] = curve.id();
      S.params["psi"] = psi.describe();
      S.params["Q"] = Qs;
      S.params["interval"] = interval_json(I);
      S.params["delta0"] = delta0;
      if (bisect) {
        S.params["bisect_c1"] = true;
      } else {
        S.params["C1"] = C1;
      }
      S.echo();
      Csv csv({"Q", "C1", "fraction", "count", "pass"});
      bool pass = false;
      ojson res = theorem4_rows(S, curve, psi, Qs, I, delta0, C1, bisect, csv, pass);
      S.emit(res, &csv);
      return pass;
    };

    if (c_t4->parsed()) {
      theorem4_cmd("ubiquity theorem4", Q4_s);
      return kOk;
    }

    if (c_bk->parsed()) {
      Session S = session("ubiquity bikt");
      PlanarCurve curve = parse_curve(curveB_s);
      Interval I = parse_interval(intervalB_s);
      auto ds = parse_double_list(deltas_s);
      S.params["curve"] = curve.id();
      S.params["interval"] = interval_json(I);
      S.params["delta"] = ds;
      S.params["K"] = K;
      S.params["T"] = T;
      S.params["grid"] = grid;
      S.echo();
      auto g = dual_pair(curve);
      ojson rows = ojson::array();
      Csv csv({"delta", "hits", "estimate", "scale", "ratio"});
      for (double d : ds) {
        auto r = measure_BIKT(g, I, d, K, T, grid);
        rows.push_back({{"delta", r.delta},
                        {"hits", r.hits},
                        {"estimate", r.estimate},
                        {"scale", r.scale},
                        {"ratio", r.ratio}});
        csv.row().add(r.delta).add(r.hits).add(r.estimate).add(r.scale).add(r.ratio);
      }
      ojson res;
      res["pair"] = g.name;
      res["rows"] = rows;
      S.emit(res, &csv);
      return kOk;
    }

    if (c_build->parsed()) {
      Session S = session("cantor build");
      ca.echo(S.params);
      S.params["eta"] = eta;
      S.echo();
      FareySource src(parse_interval(ca.interval));
      auto tree = build_cantor(src, ca.params(eta));
      auto chk = check_tree(tree);
      ojson res = tree_json(tree, chk);
      std::ostringstream jl;
      write_tree_jsonl(tree, jl);
      std::string jls = jl.str();
      S.emit(res, nullptr, &jls);
      return chk.ok() ? kOk : kAssertion;
    }

    if (c_md->parsed()) {
      Session S = session("cantor massdist");
      auto etas = parse_double_list(etas_s);
      ca.echo(S.params);
      S.params["eta"] = etas;
      S.params["random_centers"] = random_centers;
      S.params["seed"] = seed;
      S.echo();
      FareySource src(parse_interval(ca.interval));
      ojson rows = ojson::array();
      Csv csv({"eta", "max_ratio", "implied_bound", "reference", "pass", "ratio_to_previous", "tree_ok"});
      double prev = NAN;
      bool all = true;
      for (double e : etas) {
        auto tree = build_cantor(src, ca.params(e));
        auto chk = check_tree(tree);
        MassDistributionOptions mo;
        mo.random_centers = random_centers;
        mo.seed = seed;
        auto md = mass_distribution_check(tree, ca.s, mo);
        double step = std::isnan(prev) ? NAN : md.implied_bound / prev;
        bool step_ok = std::isnan(step) || (step >= 2.0 && step <= 8.0);
        all = all && chk.ok() && md.pass && step_ok;
        ojson r = tree_json(tree, chk);
        r["eta"] = e;
        r["max_ratio"] = md.max_ratio;
        r["implied_bound"] = md.implied_bound;
        r["reference"] = md.reference;
        r["pass"] = md.pass;
        r["ratio_to_previous"] = std::isnan(step) ? ojson(nullptr) : ojson(step);
        r["tests"] = md.tests;
        r["argmax_center"] = static_cast<double>(md.argmax_center);
        r["argmax_log2radius"] = md.argmax_log2radius;
        rows.push_back(r);
        csv.row().add(e).add(md.max_ratio).add(md.implied_bound).add(md.reference).add(md.pass).add(step).add(chk.ok());
        prev = md.implied_bound;
      }
      ojson res;
      res["rows"] = rows;
      res["scales_with_eta"] = all;
      S.emit(res, &csv);
      return all ? kOk : kAssertion;
    }

    if (c_cl->parsed()) {
      Session S = session("dimension classify");
      auto psi = parse_psi(psiD_s);
      S.params["kind"] = kind_s;
      S.params["psi"] = psi.describe();
      S.params["hmax"] = hmax;
      ojson res;
      auto need = [](const auto& opt, const char* name) {
        if (!opt) throw UsageError(std::string("this kind needs ") + name);
        return *opt;
      };
      if (kind_s == "khintchine") {
        S.params["n"] = nD;
        S.echo();
        res = verdict_json(classify_khintchine(psi, nD, hmax));
      } else if (kind_s == "jarnik" || kind_s == "jarnik-curve") {
        double s = need(sD, "--s");
        S.params["n"] = nD;
        S.params["s"] = s;
        S.echo();
        auto variant = kind_s == "jarnik" ? JarnikVariant::Ambient : JarnikVariant::Curve;
        res = verdict_json(classify_jarnik(psi, s, variant, nD, hmax));
      } else if (kind_s == "general") {
        if (h_s.empty()) throw UsageError("general needs --hfun");
        auto h = parse_dimension_function(h_s);
        S.params["h"] = h.describe();
        S.echo();
        auto pre = check_dimension_function(h);
        res = verdict_json(classify_general(psi, h, hmax));
        res["dimension_function"] = {{"ratio_to_infinity", pre.ratio_to_infinity},
                                     {"ratio_decreasing", pre.ratio_decreasing},
                                     {"below_half", pre.below_half},
                                     {"growth", pre.growth},
                                     {"increasing_to_zero", pre.increasing_to_zero},
                                     {"sampled", pre.sampled}};
      } else if (kind_s == "series" || kind_s == "limit") {
        double k = need(kD, "--k"), e = need(eD, "--e");
        S.params["k"] = k;
        S.params["e"] = e;
        S.echo();
        if (kind_s == "series") {
          res = verdict_json(classify_series(psi, k, e, hmax));
        } else {
          auto lv = limit_behaviour(psi, k, e, hmax);
          res["limit"] = to_string(lv.kind);
          ojson smp = ojson::array();
          for (auto [h, v] : lv.samples) smp.push_back(ojson::array({h, v}));
          res["samples"] = smp;
        }
      } else {
        throw UsageError("unknown --kind '" + kind_s + "'");
      }
      S.emit(res);
      return kOk;
    }

    if (c_pr->parsed()) {
      Session S = session("dimension predict");
      DimensionPrediction p;
      if (!quadricP.empty()) {
        double v = vP ? *vP : throw UsageError("--quadric needs --v");
        auto fix = parse_quadric(quadricP);
        S.params["quadric"] = to_string(fix.kind);
        S.params["v"] = v;
        S.echo();
        p = predict_dimension_quadric(fix.kind, v);
      } else if (lambda) {
        S.params["lambda"] = *lambda;
        S.echo();
        p = predict_dimension_from_lambda(*lambda);
      } else if (psiP) {
        auto psi = parse_psi(*psiP);
        S.params["psi"] = psi.describe();
        S.echo();
        p = predict_dimension(psi);
      } else {
        throw UsageError("predict needs --psi, --lambda or --quadric with --v");
      }
      ojson res;
      res["lambda"] = p.lambda;
      res["d"] = p.d;
      res["lambda_exact"] = p.lambda_exact;
      res["in_range"] = p.in_range;
      res["note"] = p.note;
      S.emit(res);
      return kOk;
    }

    if (c_bd->parsed()) {
      Session S = session("dimension boxdim");
      PlanarCurve curve = parse_curve(curveX_s);
      auto psi = parse_psi(psiX_s);
      Interval I = parse_interval(intervalX_s);
      auto ks = parse_int_list(exps_s);
      BoxDimensionOptions bo;
      for (auto k : ks) bo.deltas.push_back(std::ldexp(1.0, -static_cast<int>(k)));
      bo.band = band;
      S.params["curve"] = curve.id();
      S.params["psi"] = psi.describe();
      S.params["interval"] = interval_json(I);
      S.params["delta_exp"] = ks;
      S.params["band"] = band;
      S.echo();
      auto rep = box_dimension_estimate(curve, psi, I, bo);
      ojson lv = ojson::array();
      Csv csv({"delta", "Q", "q_lo", "points", "boxes"});
      for (const auto& l : rep.levels) {
        lv.push_back({{"delta", l.delta}, {"Q", l.Q}, {"q_lo", l.q_lo}, {"points", l.points}, {"boxes", l.boxes}});
        csv.row().add(l.delta).add(l.Q).add(l.q_lo).add(l.points).add(l.boxes);
      }
      ojson res;
      res["levels"] = lv;
      res["slope"] = rep.slope;
      res["intercept"] = rep.intercept;
      res["std_error"] = rep.std_error;
      res["band"] = ojson::array({rep.band_lo, rep.band_hi});
      res["empty_levels"] = rep.empty_levels;
      res["note"] = rep.note;
      auto pred = predict_dimension(psi);
      res["predicted"] = pred.d;
      S.emit(res, &csv);
      return kOk;
    }

    if (c_pts->parsed()) {
      Session S = session("quadric points");
      auto fix = parse_quadric(qkind_s);
      if (!transform_s.empty()) fix.transform = parse_affine(transform_s);
      std::optional<Interval> win;
      if (!window_s.empty()) win = parse_interval(window_s);
      if (Qmax < 1) throw UsageError("--Qmax must be >= 1");
      S.params["quadric"] = fix.describe();
      S.params["Qmax"] = Qmax;
      S.params["window"] = win ? interval_json(*win) : ojson(nullptr);
      S.echo();
      auto pts = exact_points(fix, Qmax, win);
      ojson jp = ojson::array();
      Csv csv({"p1", "p2", "q", "x", "y"});
      for (const auto& p : pts) {
        jp.push_back(point_json(p));
        csv.row().add(p.p1).add(p.p2).add(p.q).add(p.x()).add(p.y());
      }
      ojson res;
      res["count"] = pts.size();
      res["points"] = jp;
      S.emit(res, &csv);
      return kOk;
    }

    if (c_wm->parsed()) {
      Session S = session("quadric wm");
      auto fix = parse_quadric(qkind_s);
      auto Psi = parse_psi(Psi_s);
      auto ms = parse_int_list(ms_s);
      S.params["quadric"] = fix.describe();
      S.params["Psi"] = Psi.describe();
      S.params["m"] = ms;
      S.params["k"] = kW;
      S.params["enumerate_squares"] = !no_squares;
      S.params["keep_squares"] = keep_squares;
      S.echo();
      int mmax = static_cast<int>(*std::max_element(ms.begin(), ms.end()));
      if (mmax > 40 || *std::min_element(ms.begin(), ms.end()) < 0) throw UsageError("m out of range");
      SieveTable t = S.build_sieve(wm_sieve_size(fix.kind, Psi, mmax, kW), false, so);
      WmOptions wo;
      wo.k = kW;
      wo.enumerate_squares = !no_squares;
      wo.keep_squares = keep_squares;
      ojson rows = ojson::array();
      Csv csv({"m", "squares", "condition_violations", "arc_proxy", "inner_sum", "inner_ties", "ratio",
               "measure_bound"});
      for (auto m : ms) {
        auto r = build_Wm(fix, Psi, static_cast<int>(m), t, wo);
        ojson row{{"m", r.m},
                  {"k", r.k},
                  {"a", r.a},
                  {"Psi_2m", r.Psi_2m},
                  {"squares", r.squares},
                  {"condition_violations", r.condition_violations},
                  {"arc_proxy", r.arc_proxy},
                  {"inner_sum", r.inner_sum},
                  {"inner_ties", r.inner_ties},
                  {"outer", ojson::array({r.outer_lo, r.outer_hi})},
                  {"ratio", r.ratio},
                  {"measure_bound", r.measure_bound}};
        if (keep_squares) {
          ojson sq = ojson::array();
          for (const auto& w : r.kept) sq.push_back(ojson::array({w.q, w.s, w.t}));
          row["kept"] = sq;
        }
        rows.push_back(row);
        csv.row()
            .add(r.m)
            .add(r.squares)
            .add(r.condition_violations)
            .add(r.arc_proxy)
            .add(r.inner_sum)
            .add(r.inner_ties)
            .add(r.ratio)
            .add(r.measure_bound);
      }
      ojson res;
      res["rows"] = rows;
      S.emit(res, &csv);
      return kOk;
    }

    if (c_tl->parsed()) {
      Session S = session("quadric tails");
      auto fix = parse_quadric(qkind_s);
      auto psi = parse_psi(psiT_s);
      if (m_lo < 0 || m_lo > m_hi || m_hi > 200) throw UsageError("need 0 <= m-lo <= m-hi <= 200");
      S.params["quadric"] = fix.describe();
      S.params["psi"] = psi.describe();
      S.params["s"] = sT ? ojson(*sT) : ojson(nullptr);
      S.params["m_lo"] = m_lo;
      S.params["m_hi"] = m_hi;
      S.params["wm_max_m"] = wm_max;
      S.echo();
      std::optional<SieveTable> t;
      if (wm_max > 0) {
        auto aux = psi.auxiliary_half();
        t = S.build_sieve(wm_sieve_size(fix.kind, aux, std::min(wm_max, m_hi), 1), false, so);
      }
      auto rep = borel_cantelli_tail(fix, psi, sT, m_lo, m_hi, t ? &*t : nullptr, wm_max);
      ojson rows = ojson::array();
      Csv csv({"m", "term", "aux_term", "wm_arc_proxy", "wm_ratio"});
      auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };
      for (const auto& r : rep.rows) {
        rows.push_back({{"m", r.m},
                        {"term", r.term},
                        {"aux_term", opt(r.aux_term)},
                        {"wm_arc_proxy", opt(r.wm_arc_proxy)},
                        {"wm_ratio", opt(r.wm_ratio)}});
        csv.row()
            .add(r.m)
            .add(r.term)
            .add(r.aux_term.value_or(NAN))
            .add(r.wm_arc_proxy.value_or(NAN))
            .add(r.wm_ratio.value_or(NAN));
      }
      ojson res;
      res["rows"] = rows;
      res["partial"] = rep.partial;
      res["hausdorff"] = rep.hausdorff;
      res["verdict"] = verdict_json(rep.verdict);
      S.emit(res, &csv);
      return kOk;
    }

    if (c_v->parsed()) {
      if (vname == "theorem4" && vQ) return theorem4_cmd("verify theorem4", *vQ) ? kOk : kAssertion;
      Session S = session("verify");
      std::vector<int> ids;
      if (vname == "all") {
        for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
      } else {
        int id = criterion_id(vname);
        if (id < 0) throw UsageError("unknown criterion '" + vname + "'");
        ids.push_back(id);
      }
      S.params["criteria"] = ids;
      S.echo();
      CriteriaOptions co;
      co.threads = threads;
      ojson rows = ojson::array();
      bool all = true;
      for (int id : ids) {
        auto r = run_criterion(id, co);
        out << format_result(r) << "\n";
        all = all && r.pass;
        rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
      }
      ojson res;
      res["criteria"] = rows;
      res["pass"] = all;
      S.emit(res);
      return all ? kOk : kAssertion;
    }

    if (c_rp->parsed()) return replay(manifest_in, into, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const CurveFileError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kAssertion;
  }
  return kUsage;
}

}  // namespace curverat::cli
