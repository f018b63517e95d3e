#pragma once

#include <cstddef>
#include <functional>

namespace lacogsea {

/// Process-wide worker budget. 0 means "all available cores".
void set_thread_count(unsigned n) noexcept;
unsigned thread_count() noexcept;

/// Runs body(i) for i in [0, n) on up to thread_count() workers.
///
/// Each index is executed exactly once and bodies must only write to
/// per-index state, so results never depend on the worker count. The first
/// exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lacogsea
