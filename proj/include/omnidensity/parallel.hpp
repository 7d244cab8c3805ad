#pragma once
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace omni {

// Thread count: explicit flag wins, then OMNIDENSITY_THREADS, then 1.
inline int resolve_threads(int flag = 0) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("OMNIDENSITY_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Partitions [0, n) into contiguous bands, one per worker. Workers write to
// disjoint rows only, so the result is identical for every thread count.
template <class F>
void parallel_for_rows(int n, int threads, F&& body) {
  if (n <= 0) return;
  if (threads > n) threads = n;
  if (threads <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  const int base = n / threads;
  const int extra = n % threads;
  int begin = 0;
  for (int t = 0; t < threads; ++t) {
    const int len = base + (t < extra ? 1 : 0);
    pool.emplace_back([&body, begin, len] { body(begin, begin + len); });
    begin += len;
  }
  for (auto& th : pool) th.join();
}

}  // namespace omni
