#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace svqe {

/// Environment variable overriding the worker thread count.
inline constexpr const char* kThreadsEnv = "SVQE_NUM_THREADS";

/// Worker count from SVQE_NUM_THREADS, else the hardware concurrency (>= 1).
int thread_count();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// SplitMix64 finalizer; used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace svqe
