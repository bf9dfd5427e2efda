#include "gmf/graph_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace gmf {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path + "'");
  return in;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
    row.push_back(std::stod(cell));
  }
  return row;
}

}  // namespace

Graph load_graph_csv(const std::string& path) {
  auto in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_csv_row(line));
  }
  const auto n = rows.size();
  if (n < 2) throw FileError("'" + path + "': need at least 2 rows");
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw FileError("'" + path + "': row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) w(i, j) = rows[i][j];
  }
  return build_graph(w);
}

Graph load_graph_edges(const std::string& path) {
  auto in = open_or_throw(path);
  struct Edge { int u, v; double w; };
  std::vector<Edge> edges;
  int n = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::stringstream ss(line);
    int u, v;
    if (!(ss >> u)) continue;
    if (!(ss >> v))
      throw FileError("'" + path + "' line " + std::to_string(line_no) + ": expected 'u v [w]'");
    double w = 1.0;
    ss >> w;
    if (u < 1 || v < 1)
      throw FileError("'" + path + "' line " + std::to_string(line_no) + ": vertex indices are 1-based");
    if (u == v)
      throw NonzeroDiagonal("'" + path + "' line " + std::to_string(line_no) + ": self-loop at vertex " +
                            std::to_string(u));
    edges.push_back({u - 1, v - 1, w});
    n = std::max(n, std::max(u, v));
  }
  if (n < 2) throw FileError("'" + path + "': no edges found");
  Matrix w = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    w(e.u, e.v) = e.w;
    w(e.v, e.u) = e.w;
  }
  return build_graph(w);
}

Graph paper8_graph() {
  static const int edges[][2] = {{1, 2}, {1, 3}, {1, 8}, {2, 3}, {2, 4}, {2, 5}, {2, 8},
                                 {3, 4}, {4, 5}, {4, 6}, {5, 6}, {5, 7}, {5, 8}, {6, 7}};
  Matrix w = Matrix::Zero(8, 8);
  for (const auto& e : edges) {
    w(e[0] - 1, e[1] - 1) = 1.0;
    w(e[1] - 1, e[0] - 1) = 1.0;
  }
  return build_graph(w);
}

Graph resolve_graph(const std::string& spec) {
  if (spec == "paper8") return paper8_graph();
  if (spec.rfind("ring:", 0) == 0) {
    const int n = std::stoi(spec.substr(5));
    return circular_graph(n);
  }
  if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv") return load_graph_csv(spec);
  return load_graph_edges(spec);
}

GraphSignal load_signal_csv(const std::string& path) {
  auto in = open_or_throw(path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    for (double v : parse_csv_row(line)) values.push_back(v);
  }
  if (values.empty()) throw FileError("'" + path + "': empty signal");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace gmf
