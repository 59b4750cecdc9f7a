#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "a2sa/budget.hpp"
#include "a2sa/distances.hpp"
#include "a2sa/types.hpp"

namespace a2sa {

// Feature sequences are dense matrices with one column per element
// (dimension x length), so Eigen expressions feed straight in.

struct DtwResult {
    WarpingPath path;
    double total_cost = 0.0;
};

// Instrumentation filled in by the multilevel engines.
struct DtwStats {
    std::uint64_t dp_cells = 0; // DP cells visited across all levels
    int levels = 0;             // coarsening recursion depth
};

// Exact DTW over two column sequences: global-minimum monotone path under
// steps {(1,0),(0,1),(1,1)} from (0,0) to (N-1,M-1); path cost is the sum of
// the cell distances over every visited cell. Ties prefer diagonal, then
// (1,0), then (0,1).
DtwResult dtw_full(const Eigen::Ref<const Eigen::MatrixXd>& a,
                   const Eigen::Ref<const Eigen::MatrixXd>& b, DistanceKind dist,
                   const ResourceBudget* budget = nullptr);

// Exact DTW over a precomputed cell-cost matrix (rows index A, cols index B).
DtwResult dtw_on_matrix(const Eigen::Ref<const Eigen::MatrixXd>& cost,
                        const ResourceBudget* budget = nullptr);

// Multilevel approximate DTW: coarsen by pairwise column averaging down to a
// base case <= max(radius+2, 10), solve, project the path one level up,
// inflate it by `radius` and solve the corridor-constrained problem.
// Corridor memory is O((N+M) * radius).
DtwResult fastdtw(const Eigen::Ref<const Eigen::MatrixXd>& a,
                  const Eigen::Ref<const Eigen::MatrixXd>& b, DistanceKind dist, int radius,
                  DtwStats* stats = nullptr, const ResourceBudget* budget = nullptr);

// Same multilevel scheme over a precomputed cost matrix; coarsening averages
// 2x2 blocks of the cell costs.
DtwResult fastdtw_on_matrix(const Eigen::Ref<const Eigen::MatrixXd>& cost, int radius,
                            DtwStats* stats = nullptr, const ResourceBudget* budget = nullptr);

// Continuous-time view of a warping path. Runs of path pairs sharing one
// A-index collapse to a single anchor at the mean B time, so timeA is
// strictly increasing.
TimeMap path_to_time_map(const WarpingPath& path, double frame_period_a, double frame_period_b);

} // namespace a2sa
