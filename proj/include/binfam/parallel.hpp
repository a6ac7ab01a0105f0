#pragma once

#include <cstddef>
#include <functional>

namespace binfam {

// Worker cap from the BINFAM_THREADS environment variable (default 1).
std::size_t max_threads();

// Runs fn(i) for i in [0, count), split across threads when allowed. Each
// index must touch only its own outputs, so results do not depend on the
// thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace binfam
