#pragma once
#include <cstddef>
#include <functional>

namespace graphtopo {

/// Caps the worker count used by row/target-parallel solvers (0 = hardware concurrency).
void set_thread_limit(std::size_t n);
std::size_t thread_limit();

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
/// so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace graphtopo
