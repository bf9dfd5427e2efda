#pragma once

#include <string>

#include "gmf/graph.hpp"

namespace gmf {

/// Dense CSV: N rows of N comma-separated reals.
Graph load_graph_csv(const std::string& path);

/// Edge-list text: one "u v [w]" per line, 1-based indices, default w = 1.
/// Entries are symmetrized on load; blank lines and '#' comments are skipped.
Graph load_graph_edges(const std::string& path);

/// The 8-vertex unit-weight graph used throughout the worked examples
/// (edges 1-2, 1-3, 1-8, 2-3, 2-4, 2-5, 2-8, 3-4, 4-5, 4-6, 5-6, 5-7, 5-8, 6-7).
Graph paper8_graph();

/// Resolves "paper8", "ring:<n>", or a file path (.csv -> dense, else edge list).
Graph resolve_graph(const std::string& spec);

/// One real per line (or comma-separated on one line).
GraphSignal load_signal_csv(const std::string& path);

}  // namespace gmf
