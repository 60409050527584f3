#include "lscreen/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace lscreen {

int screening_threads() {
  if (const char* env = std::getenv("LS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(Eigen::Index count, const std::function<void(Eigen::Index, Eigen::Index)>& body,
                  Eigen::Index min_chunk) {
  if (count <= 0) return;
  const Eigen::Index by_size = std::max<Eigen::Index>(1, count / std::max<Eigen::Index>(1, min_chunk));
  const Eigen::Index workers = std::min<Eigen::Index>(screening_threads(), by_size);
  if (workers <= 1) {
    body(0, count);
    return;
  }
  const Eigen::Index chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace lscreen
