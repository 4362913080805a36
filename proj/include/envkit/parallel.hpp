#pragma once

#include <cstddef>
#include <functional>

namespace envkit {

/// Worker count from a request: values < 1 mean "auto" (hardware threads).
std::size_t resolve_workers(int requested);

/// Calls fn(i) for i in [0, count) on `workers` threads. Indices are claimed
/// dynamically, so fn must write results to slot i only. The first exception
/// thrown by fn is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace envkit
