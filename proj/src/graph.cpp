#include "gmf/graph.hpp"

#include <cmath>
#include <string>

namespace gmf {

namespace {
constexpr double kSymmetryTolerance = 1e-9;

std::string pair_msg(const char* what, int i, int j) {
  return std::string(what) + " at vertices (" + std::to_string(i + 1) + ", " +
         std::to_string(j + 1) + ")";
}
}  // namespace

const char* shift_kind_name(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Laplacian: return "laplacian";
    case ShiftKind::NormalizedLaplacian: return "normalized-laplacian";
    case ShiftKind::NormalizedWeight: return "normalized-weight";
    case ShiftKind::RandomWalk: return "random-walk";
    case ShiftKind::Adjacency: return "adjacency";
    case ShiftKind::AdjacencyTranspose: return "adjacency-transpose";
    case ShiftKind::AdjacencyNormalized: return "adjacency-normalized";
  }
  return "?";
}

bool is_symmetric_kind(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Laplacian:
    case ShiftKind::NormalizedLaplacian:
    case ShiftKind::NormalizedWeight:
    case ShiftKind::Adjacency:
    case ShiftKind::AdjacencyTranspose:
    case ShiftKind::AdjacencyNormalized:
      return true;
    case ShiftKind::RandomWalk:
      return false;
  }
  return false;
}

Graph build_graph(const Matrix& weights) {
  const auto n = weights.rows();
  if (weights.cols() != n || n < 2)
    throw ShapeMismatch("weight matrix must be square with at least 2 vertices");

  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0)
      throw NonzeroDiagonal("nonzero diagonal entry at vertex " + std::to_string(i + 1));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (weights(i, j) < 0.0)
        throw NegativeWeight(pair_msg("negative weight", static_cast<int>(i), static_cast<int>(j)));
      if (j > i && std::abs(weights(i, j) - weights(j, i)) > kSymmetryTolerance)
        throw AsymmetricWeights(pair_msg("asymmetric weights", static_cast<int>(i), static_cast<int>(j)));
    }
  }

  Graph g{weights, weights.rowwise().sum()};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (g.degrees(i) == 0.0)
      throw IsolatedVertex("vertex " + std::to_string(i + 1) +
                           " has zero degree (fatal for normalized operators)");
  }
  return g;
}

Graph circular_graph(int n) {
  if (n < 3) throw TooSmall("ring graph needs at least 3 vertices, got " + std::to_string(n));
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    w(i, j) = 1.0;
    w(j, i) = 1.0;
  }
  return build_graph(w);
}

DirectedGraph build_directed_graph(const Matrix& adjacency) {
  const auto n = adjacency.rows();
  if (adjacency.cols() != n || n < 2)
    throw ShapeMismatch("adjacency matrix must be square with at least 2 vertices");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0)
      throw NonzeroDiagonal("self-loop at vertex " + std::to_string(i + 1));
    for (Eigen::Index j = 0; j < n; ++j)
      if (adjacency(i, j) != 0.0 && adjacency(i, j) != 1.0)
        throw Error(pair_msg("directed adjacency entries must be 0 or 1; bad entry",
                             static_cast<int>(i), static_cast<int>(j)));
  }
  return DirectedGraph{adjacency};
}

DirectedGraph directed_ring(int n) {
  if (n < 3) throw TooSmall("directed ring needs at least 3 vertices, got " + std::to_string(n));
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = 1.0;
  return build_directed_graph(a);
}

ShiftOperator shift_operator(const Graph& graph, ShiftKind kind) {
  const int n = graph.size();
  const Matrix& w = graph.weights;
  const Vector& d = graph.degrees;

  const bool needs_positive_degrees = kind == ShiftKind::Laplacian ||
                                      kind == ShiftKind::NormalizedLaplacian ||
                                      kind == ShiftKind::NormalizedWeight ||
                                      kind == ShiftKind::RandomWalk;
  if (needs_positive_degrees) {
    for (int i = 0; i < n; ++i)
      if (d(i) <= 0.0)
        throw ZeroDegreeVertex("vertex " + std::to_string(i + 1) +
                               " has zero degree; " + shift_kind_name(kind) +
                               " operator is undefined");
  }

  switch (kind) {
    case ShiftKind::Laplacian:
      return {kind, Matrix(d.asDiagonal()) - w};
    case ShiftKind::NormalizedWeight: {
      const Vector inv_sqrt = d.array().rsqrt();
      return {kind, inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal()};
    }
    case ShiftKind::NormalizedLaplacian: {
      const Vector inv_sqrt = d.array().rsqrt();
      return {kind, Matrix::Identity(n, n) - inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal()};
    }
    case ShiftKind::RandomWalk:
      return {kind, d.array().inverse().matrix().asDiagonal() * w};
    case ShiftKind::Adjacency:
      return {kind, w};
    case ShiftKind::AdjacencyTranspose:
      return {kind, w.transpose()};
    case ShiftKind::AdjacencyNormalized: {
      const double radius =
          Eigen::SelfAdjointEigenSolver<Matrix>(w, Eigen::EigenvaluesOnly)
              .eigenvalues()
              .cwiseAbs()
              .maxCoeff();
      if (radius == 0.0) throw ZeroDegreeVertex("graph has no edges; spectral radius is zero");
      return {kind, w / radius};
    }
  }
  throw Error("unknown shift kind");
}

GraphSignal apply_shift(const ShiftOperator& op, const GraphSignal& x, int power) {
  if (x.size() != op.size())
    throw DimensionMismatch("signal length " + std::to_string(x.size()) +
                            " does not match operator size " + std::to_string(op.size()));
  if (power < 0) throw Error("shift power must be nonnegative");
  GraphSignal y = x;
  for (int m = 0; m < power; ++m) y = op.matrix * y;
  return y;
}

GraphSignal directed_shift(const DirectedGraph& dg, const GraphSignal& x,
                           double w0, double w1, double w2) {
  if (x.size() != dg.size())
    throw DimensionMismatch("signal length " + std::to_string(x.size()) +
                            " does not match graph size " + std::to_string(dg.size()));
  return w0 * x + w1 * (dg.adjacency * x) + w2 * (dg.adjacency.transpose() * x);
}

}  // namespace gmf
