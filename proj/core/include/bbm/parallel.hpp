#pragma once

#include <cstddef>
#include <functional>

namespace bbm {

/// Worker count: hardware concurrency, capped by the BBM_THREADS environment
/// variable when it holds a positive integer. Always >= 1.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Indices are
/// claimed dynamically, so body must not depend on execution order. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bbm
