#pragma once

#include <functional>

namespace hitchin {

/// Worker count: `requested` if positive, else HITCHIN_SOV_THREADS if set,
/// else the hardware concurrency. Always capped by HITCHIN_SOV_THREADS.
int worker_count(int requested = 0);

/// Runs f(0..n-1) on up to worker_count(threads) threads. Each index must
/// write only its own output slot. If any call throws, the exception of the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& f, int threads = 0);

}  // namespace hitchin
