#pragma once

#include <cstddef>
#include <functional>

namespace fbis {

// Worker cap shared by all parallel loops. 0 = hardware concurrency.
// FBIS_THREADS is consulted once at startup; the CLI --threads flag overrides.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs fn(begin, end) over a partition of [0, n). Each task must write only
// to its own output slots; with that contract results do not depend on the
// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace fbis
