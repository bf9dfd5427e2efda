#pragma once

#include <vector>

#include "gmf/graph.hpp"

namespace gmf {

/// Binary partition matrix P (N_c x N): each column has exactly one 1, each
/// row is a nonempty group of vertices. Groups are listed in the order they
/// were formed; canonical() reorders them by smallest member for comparisons.
struct IndicatorMatrix {
  Matrix matrix;
  std::vector<std::vector<int>> groups;  // 0-based vertex indices

  int coarse_size() const { return static_cast<int>(matrix.rows()); }
  int fine_size() const { return static_cast<int>(matrix.cols()); }

  IndicatorMatrix canonical() const;
};

IndicatorMatrix indicator_from_groups(std::vector<std::vector<int>> groups, int n_vertices);

/// Output of signal-driven max-pool coarsening.
struct CoarseningResult {
  IndicatorMatrix indicator;
  Matrix coarse_weights;          // P W P^T over the formation-order groups
  Vector pooled_values;           // max of the signal over each group
  std::vector<int> kept_vertices; // 0-based vertex achieving each max
};

/// Greedy signal-driven coarsening: repeatedly take the highest-valued
/// unassigned vertex (lowest index on ties) and fuse it with its unassigned
/// one-hop neighbors into a super-vertex carrying the max value. Requires a
/// nonnegative (post-ReLU) signal.
CoarseningResult max_pool_coarsen(const Graph& graph, const GraphSignal& signal);

/// W_c = P W P^T
Matrix coarsen_weights(const Matrix& weights, const IndicatorMatrix& p);

/// P^+ = P^T (P P^T)^{-1}; satisfies P P^+ = I, with column i equal to
/// 1/|group i| on that group's rows.
Matrix pseudo_inverse(const IndicatorMatrix& p);

/// W_L = P^+ W_c (P^+)^T
Matrix lift_weights(const Matrix& coarse_weights, const IndicatorMatrix& p);

/// L_c = P L P^T (rows still sum to zero)
Matrix coarsen_laplacian(const Matrix& laplacian, const IndicatorMatrix& p);

/// L_L = P^+ L_c (P^+)^T
Matrix lift_laplacian(const Matrix& coarse_laplacian, const IndicatorMatrix& p);

struct CoarseningLevel {
  IndicatorMatrix indicator;
  Matrix weights;  // weights after this level
};

/// Chained coarsening; signals[l] must have the vertex count of level l.
std::vector<CoarseningLevel> multilevel(const Graph& graph,
                                        const std::vector<GraphSignal>& signals);

/// K x N indicator with a 1 where a value survived both the ReLU and the
/// max-pooling: entry (k, n) is 1 iff n is the kept vertex of its group in
/// channel k's coarsening and the pooled value is positive.
Matrix pool_indicator(const Matrix& relu_mask, const std::vector<CoarseningResult>& results);

}  // namespace gmf
