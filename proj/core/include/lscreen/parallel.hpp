#pragma once

#include <functional>

#include <Eigen/Core>

namespace lscreen {

/// Worker count for per-feature maps: LS_THREADS if set (>= 1), otherwise
/// std::thread::hardware_concurrency().
int screening_threads();

/// Runs body(begin, end) over [0, count) split into contiguous chunks. Each
/// index is visited exactly once; results written per index are identical for
/// any thread count.
void parallel_for(Eigen::Index count, const std::function<void(Eigen::Index, Eigen::Index)>& body,
                  Eigen::Index min_chunk = 2048);

}  // namespace lscreen
