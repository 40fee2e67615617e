#pragma once

#include <cstddef>
#include <functional>

namespace flatbands {

/// Process-wide worker count used by parallel_for. 0 selects
/// std::thread::hardware_concurrency().
void set_worker_count(std::size_t workers);
std::size_t worker_count();

/// Runs fn(0..count-1) on up to worker_count() threads. Callers write results
/// into per-index slots, so output order never depends on scheduling. The
/// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace flatbands
