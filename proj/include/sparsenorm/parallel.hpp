#pragma once

#include <functional>

namespace sparsenorm {

/// Runs body(i) for every i in [0, count) on `threads` workers
/// (0: hardware concurrency). Indices are handed out through an atomic
/// counter; the first exception thrown by any body is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace sparsenorm
