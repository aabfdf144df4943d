#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "curverat/cli/cli.hpp"
#include "curverat/cli/criteria.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using curverat::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("curverat-test-" + std::to_string(::getpid())) / name;
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("same command twice gives identical bytes") {
  auto d = scratch("twice");
  std::vector<std::string> base = {"--no-cache", "count", "--curve", "circle", "--Q", "200", "--psi", "pow:1.5",
                                   "--keep-points"};
  auto a = base, b = base;
  a.insert(a.end(), {"--json", (d / "a.json").string(), "--csv", (d / "a.csv").string()});
  b.insert(b.end(), {"--json", (d / "b.json").string(), "--csv", (d / "b.csv").string()});
  REQUIRE(invoke(a).code == 0);
  REQUIRE(invoke(b).code == 0);
  CHECK(curverat::cli::sha256_file((d / "a.json").string()) == curverat::cli::sha256_file((d / "b.json").string()));
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
}

TEST_CASE("stdout starts with the parameter echo") {
  auto r = invoke({"--no-cache", "count", "--curve", "parabola", "--Q", "30"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("params {", 0) == 0);
  auto first = r.out.substr(7, r.out.find('\n') - 7);
  auto p = nlohmann::json::parse(first);
  CHECK(p["Q"] == 30);
  CHECK(p["curve"] == "parabola");
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == curverat::cli::kUsage);
  CHECK(invoke({"count", "--bogus"}).code == curverat::cli::kUsage);
  CHECK(invoke({"count", "--Q", "0"}).code == curverat::cli::kUsage);
  CHECK(invoke({"count", "--Q", "10", "--psi", "pow:-1"}).code == curverat::cli::kUsage);
  CHECK(invoke({"--help"}).code == curverat::cli::kOk);
  CHECK(invoke({"--version"}).code == curverat::cli::kOk);
  CHECK(invoke({"--no-cache", "count", "--Q", "10", "--json", "/nonexistent-dir/x/y.json"}).code ==
        curverat::cli::kIo);
  CHECK(invoke({"replay", "/nonexistent-dir/m.json"}).code == curverat::cli::kIo);
  CHECK(invoke({"count", "--curve", "file:/nonexistent-dir/c.csv", "--Q", "10"}).code == curverat::cli::kIo);
  CHECK(invoke({"count", "--curve", "spiral", "--Q", "10"}).code == curverat::cli::kUsage);
}

TEST_CASE("csv rows carry the params hash") {
  auto d = scratch("csv");
  auto r = invoke({"--no-cache", "count", "--curve", "circle", "--Q", "60", "--psi", "const:0.05", "--keep-points",
                   "--json", (d / "c.json").string(), "--csv", (d / "c.csv").string()});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::ordered_json::parse(slurp(d / "c.json"));
  CHECK(doc["schema"] == "curverat.count/1");
  std::istringstream csv(slurp(d / "c.csv"));
  std::string header, line;
  std::getline(csv, header);
  CHECK(header.substr(header.rfind(',') + 1) == "params_hash");
  int rows = 0;
  std::string hash;
  while (std::getline(csv, line)) {
    auto h = line.substr(line.rfind(',') + 1);
    CHECK(h.size() == 16);
    if (hash.empty()) hash = h;
    CHECK(h == hash);
    ++rows;
  }
  CHECK(rows == doc["results"]["count"].get<int>());
}

TEST_CASE("replay reproduces digests") {
  auto d = scratch("replay");
  auto m = (d / "run.manifest.json").string();
  REQUIRE(invoke({"--no-cache", "sieve", "rn", "--N", "5000", "--check", "500", "--json", (d / "rn.json").string(),
                  "--manifest", m})
              .code == 0);
  auto man = nlohmann::json::parse(slurp(m));
  CHECK(man["outputs"].size() == 1);
  auto r = invoke({"replay", m, "--into", (d / "again").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("replay identical") != std::string::npos);
}

TEST_CASE("verify theorem4 on the parabola example") {
  auto r = invoke({"verify", "theorem4", "--curve", "parabola", "--psi", "pow:0.6", "--Q", "2^8..2^11"});
  CHECK(r.code == 0);
}

TEST_CASE("criterion names") {
  CHECK(curverat::cli::criterion_id("replay") == 12);
  CHECK(curverat::cli::criterion_id("3") == 3);
  CHECK(curverat::cli::criterion_name(1) == "sieve");
  curverat::cli::CriterionResult cr{5, "count", true, "ok", 0.25};
  CHECK(curverat::cli::format_result(cr).rfind("criterion  5 PASS", 0) == 0);
}

TEST_CASE("lemma scans on a small range") {
  auto s1 = curverat::cli::lemma1_scan(400, 400, 50);
  CHECK(s1.violations == 0);
  CHECK(s1.rho_mismatches == 0);
  CHECK(s1.pairs > 0);
  auto s2 = curverat::cli::lemma2_scan(20000);
  CHECK(s2.violations == 0);
}
