#pragma once

#include <cstddef>
#include <functional>

namespace rigcert {

// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n) over contiguous chunks. Callers write results
// into per-index slots and reduce sequentially, so output never depends on
// the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rigcert
