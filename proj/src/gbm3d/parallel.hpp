#pragma once

#include <cstddef>
#include <functional>

namespace gbm3d {

/// Number of workers to use when the caller passes 0.
int default_workers();

/// Runs fn(index, worker) for every index in [0, count) on at most `workers`
/// threads (the calling thread is one of them). Indices are claimed from a
/// shared counter, so results must be written to per-index slots for the
/// outcome to be independent of scheduling. A parallel_for issued from inside
/// another one runs serially on the calling worker. The first exception thrown
/// by any job is rethrown after all workers have stopped.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t, int)>& fn);

}  // namespace gbm3d
