#include <cstdlib>
#include <iostream>
#include <string>

#include "curverat/cli/criteria.hpp"

// Prints one line per criterion; exit status 1 when any fails.
int main(int argc, char** argv) {
  curverat::cli::CriteriaOptions opt;
  if (const char* t = std::getenv("CURVERAT_THREADS")) opt.threads = std::atoi(t);
  int lo = 1, hi = curverat::cli::kCriterionCount;
  if (argc > 1) {
    int id = curverat::cli::criterion_id(argv[1]);
    if (id < 0) {
      std::cerr << "unknown criterion " << argv[1] << "\n";
      return 2;
    }
    lo = hi = id;
  }
  int failed = 0;
  for (int id = lo; id <= hi; ++id) {
    auto r = curverat::cli::run_criterion(id, opt);
    std::cout << curverat::cli::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
