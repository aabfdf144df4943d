#include <cmath>
#include <sstream>
#include <string>

#include "curverat/cantor.hpp"
#include "doctest.h"

using namespace curverat;

namespace {
CantorParams toy(double eta, int depth = 3) {
  CantorParams p = toy_params(2.2, 0.1, eta);
  p.max_depth = depth;
  p.schedule = Schedule{std::sqrt(2.0)};
  return p;
}
}  // namespace

TEST_CASE("toy construction to depth 3") {
  FareySource src({0.0, 1.0});
  for (double eta : {4.0, 16.0, 64.0}) {
    auto tree = build_cantor(src, toy(eta));
    CHECK(tree.depth() == 3);
    CHECK(tree.branch == CantorBranch::Infinite);
    CHECK(tree.min_V_over_G() >= 0.5);
    CHECK(tree.min_V_over_G() <= 1.0);
    for (const auto& st : tree.steps) {
      CHECK(st.V <= st.G);
      CHECK(2 * st.V >= st.G);
    }
    auto chk = check_tree(tree);
    CHECK(chk.disjoint);
    CHECK(chk.nested);
    CHECK(chk.max_mass_error <= 1e-12);
    CHECK(chk.bink);
    CHECK(chk.infinite_bound);
    CHECK(chk.ok());
  }
}

TEST_CASE("depth 1 tree and measures") {
  FareySource src({0.0, 1.0});
  auto tree = build_cantor(src, toy(16.0, 1));
  REQUIRE(tree.depth() == 1);
  CHECK(check_tree(tree).disjoint);
  CHECK(cantor_measure(tree, 0) == 1.0L);
  const auto& level = tree.generations[1];
  REQUIRE(!level.empty());
  long double sum = 0.0L;
  for (auto i : level) {
    CHECK(tree.nodes[static_cast<std::size_t>(i)].parent == 0);
    CHECK(std::abs(static_cast<double>(cantor_measure(tree, i)) - 1.0 / static_cast<double>(level.size())) <= 1e-15);
    sum += cantor_measure(tree, i);
  }
  CHECK(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
  CHECK_THROWS_AS(cantor_measure(tree, static_cast<std::int64_t>(tree.nodes.size())), std::out_of_range);
}

TEST_CASE("parameter gates") {
  FareySource src({0.0, 1.0});
  auto p = toy(1.5);
  p.branch = CantorBranch::Finite;
  CHECK_THROWS_AS(build_cantor(src, p), CantorParamError);
  auto q = toy(16.0);
  q.lambda = 0.2;
  CHECK_THROWS_AS(build_cantor(src, q), CantorParamError);
  auto r = toy(16.0);
  r.s = 1.5;
  CHECK_THROWS_AS(build_cantor(src, r), CantorParamError);
}

TEST_CASE("mass distribution bound grows with eta") {
  FareySource src({0.0, 1.0});
  double prev = 0.0;
  for (double eta : {4.0, 16.0, 64.0}) {
    auto tree = build_cantor(src, toy(eta));
    MassDistributionOptions mo;
    mo.random_centers = 10000;
    auto md = mass_distribution_check(tree, 0.1, mo);
    CHECK(md.pass);
    CHECK(md.max_ratio <= md.reference);
    CHECK(md.tests > 10000);
    if (prev > 0.0) {
      CHECK(md.implied_bound / prev >= 2.0);
      CHECK(md.implied_bound / prev <= 8.0);
    }
    prev = md.implied_bound;
    // same seed, same report
    auto again = mass_distribution_check(tree, 0.1, mo);
    CHECK(again.max_ratio == md.max_ratio);
  }
}

TEST_CASE("tree export and quasi-independence") {
  FareySource src({0.0, 1.0});
  auto tree = build_cantor(src, toy(16.0, 2));
  std::ostringstream os;
  write_tree_jsonl(tree, os);
  std::istringstream is(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) {
    CHECK(line.find("\"parentIndex\"") != std::string::npos);
    ++lines;
  }
  CHECK(lines == tree.nodes.size());
  double qi = quasi_independence_ratio(src, log_power(2.2), Schedule{2.0}, 3, 7, {0.0, 1.0});
  CHECK(std::isfinite(qi));
  CHECK(qi > 0.0);
}

TEST_CASE("system source agrees with the Farey source") {
  auto sys = ResonantSystem::rationals({0.0, 1.0}, 200);
  SystemSource a(sys);
  FareySource b({0.0, 1.0});
  for (long double x : {0.0L, 0.1L, 0.333L, 0.5L, 0.77L}) {
    for (double B : {1.0, 7.0, 50.0, 200.0}) {
      auto pa = a.first_at_least(x, B);
      auto pb = b.first_at_least(x, B);
      REQUIRE(pa.has_value() == pb.has_value());
      if (pa) {
        CHECK(std::abs(static_cast<double>(pa->x - pb->x)) <= 1e-15);
        CHECK(pa->beta == pb->beta);
      }
    }
  }
}
