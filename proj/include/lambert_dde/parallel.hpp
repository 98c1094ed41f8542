#pragma once

#include <cstddef>
#include <functional>

namespace lambert_dde {

/// Worker count: hardware concurrency, capped by LAMBERT_DDE_THREADS.
[[nodiscard]] unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Bodies must be independent; the first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lambert_dde
