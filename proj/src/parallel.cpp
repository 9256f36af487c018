#include "parec/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace parec {

int worker_count(int requested) {
  int cap = 0;
  if (const char* env = std::getenv("CR_THREADS")) {
    cap = std::atoi(env);
  }
  int n = requested > 0 ? requested : (cap > 0 ? cap : int(std::thread::hardware_concurrency()));
  if (n < 1) n = 1;
  if (cap > 0) n = std::min(n, cap);
  return n;
}

void parallel_for(int begin, int end, int jobs, const std::function<void(int, int)>& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  const int chunk = (count + jobs - 1) / jobs;
  for (int t = 0; t < jobs; ++t) {
    const int lo = begin + t * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace parec
