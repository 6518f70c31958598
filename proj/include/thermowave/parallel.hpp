#pragma once

#include <cstddef>
#include <functional>

namespace thermowave {

/// Worker cap: THERMOWAVE_THREADS if set and positive, else hardware concurrency.
std::size_t worker_limit();

/// Run body(i) for i in [0, count) on at most worker_limit() threads. Each index
/// is handled exactly once; the first exception thrown by any job is rethrown
/// after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace thermowave
