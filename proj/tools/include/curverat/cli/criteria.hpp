#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace curverat::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct CriteriaOptions {
  int threads = 0;
  std::string work_dir;  // scratch space for the replay criterion; empty means a temp directory
};

inline constexpr int kCriterionCount = 12;

// short names: sieve, gauss, theoremA, lemmas, count, theorem3, theorem4, cantor, dimension,
// classifiers, quadrics, replay
std::string criterion_name(int id);
int criterion_id(const std::string& name);  // -1 when unknown; also accepts "1".."12"

CriterionResult run_criterion(int id, const CriteriaOptions& opt = {});

// "criterion  3 FAIL theoremA ...": one line, no trailing newline
std::string format_result(const CriterionResult& r);

// Exhaustive scans shared with the sieve subcommand.
struct Lemma1Scan {
  std::int64_t pairs = 0;
  std::int64_t violations = 0;
  std::int64_t rho_mismatches = 0;  // rho_congruence against the residue histogram, m <= cross_check_m
  std::string first_violation;
};
Lemma1Scan lemma1_scan(std::int64_t m_max, std::int64_t h_max, std::int64_t cross_check_m);

struct Lemma2Scan {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  std::string first_violation;
};
Lemma2Scan lemma2_scan(std::int64_t n_max);

}  // namespace curverat::cli
