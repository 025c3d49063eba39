#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace isinglab {

// Worker-pool size: ISINGLAB_WORKERS env var, else hardware concurrency.
inline int default_worker_count() {
  if (const char* env = std::getenv("ISINGLAB_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Splits `total` samples over `shards` (first shards get the remainder).
inline long long shard_size(long long total, int shards, int shard) {
  const long long base = total / shards;
  const long long rem = total % shards;
  return base + (shard < rem ? 1 : 0);
}

// Runs fn(shard) for shard = 0..shards-1 on a small pool and merges the
// per-shard accumulators in shard order, so the result depends only on
// (inputs, shards), never on thread scheduling.
template <typename Acc, typename Fn>
Acc shard_map_reduce(int shards, Fn&& fn, int workers = -1) {
  if (shards < 1) shards = 1;
  if (workers <= 0) workers = default_worker_count();
  if (workers > shards) workers = shards;

  std::vector<Acc> results(static_cast<std::size_t>(shards));
  if (workers == 1) {
    for (int s = 0; s < shards; ++s) results[static_cast<std::size_t>(s)] = fn(s);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int s = w; s < shards; s += workers) results[static_cast<std::size_t>(s)] = fn(s);
      });
    }
    for (auto& t : pool) t.join();
  }

  Acc merged = results[0];
  for (int s = 1; s < shards; ++s) merged.merge(results[static_cast<std::size_t>(s)]);
  return merged;
}

}  // namespace isinglab
