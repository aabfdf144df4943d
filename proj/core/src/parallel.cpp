#include "curverat/parallel.hpp"

namespace curverat {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void set_default_threads(int n) { g_threads.store(n > 0 ? n : 0); }

}  // namespace curverat
