#ifndef PUCCI_FORGE_PARALLEL_HPP
#define PUCCI_FORGE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace pucci {

/// Worker count: hardware concurrency, capped by PUCCI_FORGE_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Indices are handed out dynamically, so the
/// body must write only to slot i of its output; results are then independent
/// of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pucci

#endif  // PUCCI_FORGE_PARALLEL_HPP
