#pragma once

#include <Eigen/Dense>

#include "gmf/errors.hpp"

namespace gmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A signal is one real value per vertex.
using GraphSignal = Eigen::VectorXd;

/// Undirected graph: symmetric nonnegative weight matrix with zero diagonal,
/// plus cached vertex degrees (row sums). Immutable after construction;
/// build with build_graph() to get validation. Vertex indices are 1-based in
/// every message and file format, 0-based in storage.
struct Graph {
  Matrix weights;
  Vector degrees;

  int size() const { return static_cast<int>(weights.rows()); }
};

/// Directed unweighted graph; A(u,v) = 1 iff there is an edge u -> v.
struct DirectedGraph {
  Matrix adjacency;

  int size() const { return static_cast<int>(adjacency.rows()); }
};

enum class ShiftKind {
  Laplacian,            // D - W
  NormalizedLaplacian,  // I - D^{-1/2} W D^{-1/2}
  NormalizedWeight,     // D^{-1/2} W D^{-1/2}
  RandomWalk,           // D^{-1} W
  Adjacency,            // W
  AdjacencyTranspose,   // W^T
  AdjacencyNormalized,  // W / spectral_radius(W)
};

const char* shift_kind_name(ShiftKind kind);
bool is_symmetric_kind(ShiftKind kind);

/// A realized shift operator matrix tagged with its kind.
struct ShiftOperator {
  ShiftKind kind;
  Matrix matrix;

  int size() const { return static_cast<int>(matrix.rows()); }
};

/// Validates and builds a graph from a dense weight matrix.
/// Symmetry is accepted up to absolute 1e-9 (external data is rarely exact);
/// rejects negative weights, nonzero diagonals and zero-degree vertices.
Graph build_graph(const Matrix& weights);

/// Unweighted ring on n >= 3 vertices; every degree is 2.
Graph circular_graph(int n);

/// Validates a binary zero-diagonal adjacency matrix (not required symmetric).
DirectedGraph build_directed_graph(const Matrix& adjacency);

/// Directed ring on n >= 3 vertices with edges i -> i+1 (mod n).
DirectedGraph directed_ring(int n);

ShiftOperator shift_operator(const Graph& graph, ShiftKind kind);

/// S^m x by repeated matrix-vector products (never an explicit matrix power),
/// so the result stays localized to the m-hop neighborhood of the support.
GraphSignal apply_shift(const ShiftOperator& op, const GraphSignal& x, int power = 1);

/// w0*x + w1*A*x + w2*A^T*x on a directed graph (vertex domain only).
GraphSignal directed_shift(const DirectedGraph& dg, const GraphSignal& x,
                           double w0, double w1, double w2);

}  // namespace gmf
