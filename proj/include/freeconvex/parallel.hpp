#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace freeconvex {

/// Worker count: FREECONVEX_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. Each index is
/// visited exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// SplitMix64 step, used to derive per-task seeds from a single user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace freeconvex
