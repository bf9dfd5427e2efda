#include "gmf/coarsening.hpp"

#include <algorithm>
#include <string>

namespace gmf {

IndicatorMatrix IndicatorMatrix::canonical() const {
  auto sorted_groups = groups;
  for (auto& g : sorted_groups) std::sort(g.begin(), g.end());
  std::sort(sorted_groups.begin(), sorted_groups.end());
  return indicator_from_groups(std::move(sorted_groups), fine_size());
}

IndicatorMatrix indicator_from_groups(std::vector<std::vector<int>> groups, int n_vertices) {
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(groups.size()), n_vertices);
  std::vector<bool> seen(static_cast<std::size_t>(n_vertices), false);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) throw ShapeMismatch("indicator group " + std::to_string(i + 1) + " is empty");
    for (int v : groups[i]) {
      if (v < 0 || v >= n_vertices || seen[static_cast<std::size_t>(v)])
        throw ShapeMismatch("indicator groups must partition the vertices");
      seen[static_cast<std::size_t>(v)] = true;
      p(static_cast<Eigen::Index>(i), v) = 1.0;
    }
  }
  for (bool s : seen)
    if (!s) throw ShapeMismatch("indicator groups must cover every vertex");
  return {std::move(p), std::move(groups)};
}

CoarseningResult max_pool_coarsen(const Graph& graph, const GraphSignal& signal) {
  const int n = graph.size();
  if (signal.size() != n) throw ShapeMismatch("signal length does not match graph size");
  for (int i = 0; i < n; ++i)
    if (signal(i) < 0.0)
      throw NegativeSignal("pooling needs a nonnegative (post-ReLU) signal; vertex " +
                           std::to_string(i + 1) + " is negative");

  std::vector<bool> assigned(static_cast<std::size_t>(n), false);
  std::vector<std::vector<int>> groups;
  std::vector<int> kept;
  std::vector<double> pooled;
  int remaining = n;
  while (remaining > 0) {
    int seed = -1;
    for (int i = 0; i < n; ++i) {
      if (assigned[static_cast<std::size_t>(i)]) continue;
      if (seed < 0 || signal(i) > signal(seed)) seed = i;
    }
    std::vector<int> group{seed};
    assigned[static_cast<std::size_t>(seed)] = true;
    for (int j = 0; j < n; ++j) {
      if (!assigned[static_cast<std::size_t>(j)] && graph.weights(seed, j) > 0.0) {
        group.push_back(j);
        assigned[static_cast<std::size_t>(j)] = true;
      }
    }
    remaining -= static_cast<int>(group.size());
    groups.push_back(std::move(group));
    kept.push_back(seed);
    pooled.push_back(signal(seed));
  }

  CoarseningResult result;
  result.indicator = indicator_from_groups(std::move(groups), n);
  result.coarse_weights = coarsen_weights(graph.weights, result.indicator);
  result.pooled_values = Eigen::Map<const Vector>(pooled.data(), static_cast<Eigen::Index>(pooled.size()));
  result.kept_vertices = std::move(kept);
  return result;
}

Matrix coarsen_weights(const Matrix& weights, const IndicatorMatrix& p) {
  if (weights.rows() != weights.cols() || weights.rows() != p.fine_size())
    throw ShapeMismatch("weight matrix does not match indicator size");
  return p.matrix * weights * p.matrix.transpose();
}

Matrix pseudo_inverse(const IndicatorMatrix& p) {
  // P P^T is diagonal with the group sizes, so the inverse is a column scale.
  Matrix pinv = p.matrix.transpose();
  for (Eigen::Index i = 0; i < pinv.cols(); ++i)
    pinv.col(i) /= static_cast<double>(p.groups[static_cast<std::size_t>(i)].size());
  return pinv;
}

Matrix lift_weights(const Matrix& coarse_weights, const IndicatorMatrix& p) {
  if (coarse_weights.rows() != coarse_weights.cols() || coarse_weights.rows() != p.coarse_size())
    throw ShapeMismatch("coarse matrix does not match indicator size");
  const Matrix pinv = pseudo_inverse(p);
  return pinv * coarse_weights * pinv.transpose();
}

Matrix coarsen_laplacian(const Matrix& laplacian, const IndicatorMatrix& p) {
  return coarsen_weights(laplacian, p);
}

Matrix lift_laplacian(const Matrix& coarse_laplacian, const IndicatorMatrix& p) {
  return lift_weights(coarse_laplacian, p);
}

std::vector<CoarseningLevel> multilevel(const Graph& graph,
                                        const std::vector<GraphSignal>& signals) {
  std::vector<CoarseningLevel> levels;
  Graph current = graph;
  for (std::size_t l = 0; l < signals.size(); ++l) {
    if (signals[l].size() != current.size())
      throw ShapeMismatch("level " + std::to_string(l + 1) + " signal has length " +
                          std::to_string(signals[l].size()) + ", expected " +
                          std::to_string(current.size()));
    CoarseningResult r = max_pool_coarsen(current, signals[l]);
    levels.push_back({r.indicator, r.coarse_weights});
    if (r.coarse_weights.rows() < 2) break;  // nothing left to coarsen
    current.weights = r.coarse_weights;
    current.degrees = r.coarse_weights.rowwise().sum();
  }
  return levels;
}

Matrix pool_indicator(const Matrix& relu_mask, const std::vector<CoarseningResult>& results) {
  const auto k_count = relu_mask.rows();
  const auto n = relu_mask.cols();
  if (static_cast<Eigen::Index>(results.size()) != k_count)
    throw ShapeMismatch("one coarsening result per channel required");
  Matrix indicator = Matrix::Zero(k_count, n);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const auto& r = results[static_cast<std::size_t>(k)];
    if (r.indicator.fine_size() != n) throw ShapeMismatch("coarsening size does not match mask");
    for (std::size_t g = 0; g < r.kept_vertices.size(); ++g) {
      const int v = r.kept_vertices[g];
      if (r.pooled_values(static_cast<Eigen::Index>(g)) > 0.0 && relu_mask(k, v) != 0.0)
        indicator(k, v) = 1.0;
    }
  }
  return indicator;
}

}  // namespace gmf
