#pragma once

#include <cstddef>
#include <functional>

namespace fracflow {

/// Number of worker threads used by field-wide evaluations. Resolution order:
/// value set via set_thread_count (CLI --threads), else the FRACFLOW_THREADS
/// environment variable, else std::thread::hardware_concurrency().
int thread_count();
void set_thread_count(int n);  // n <= 0 restores automatic resolution

/// Runs fn(i) for i in [0, n) on the worker pool. Each index is processed by
/// exactly one thread and writes only its own outputs, so results are
/// independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fracflow
