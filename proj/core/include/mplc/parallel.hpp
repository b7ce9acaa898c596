#pragma once

#include <cstdint>
#include <functional>

namespace mplc {

// Runs fn(0..count-1) across up to `threads` workers. Items must be
// independent; callers merge results by index so the outcome does not depend
// on scheduling. The first exception thrown by any item is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// splitmix64 mix of a base seed with a task index; used to give batch items
// independent, reproducible RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mplc
