#include "czlab/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace czlab {

namespace {
int g_max_threads = 0;  // 0 = use hardware count
}

void set_max_threads(int n) { g_max_threads = n; }

int max_threads() {
  if (g_max_threads > 0) return g_max_threads;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  int nt = std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (nt <= 1) {
    fn(0, n);
    return;
  }
  std::size_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    std::size_t b = static_cast<std::size_t>(t) * chunk;
    std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace czlab
