#ifndef SGFL_GRAPH_HPP
#define SGFL_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgfl/rng.hpp"

namespace sgfl {

struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
  double p = 1.0;  ///< per-step activation probability in (0, 1]
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Undirected weighted graph whose edges are activated independently at every
/// time step with their own probability. Each unordered pair is stored once.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n_nodes);
  Graph(int n_nodes, std::vector<Edge> edges);

  int n_nodes() const { return n_nodes_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Adds edge {i, j}; throws on self loops, duplicates, bad weight or p.
  void add_edge(int i, int j, double weight = 1.0, double p = 1.0);

  void set_uniform_probability(double p);
  void set_probability(int edge_index, double p);

  const std::optional<std::vector<Point2>>& positions() const { return positions_; }
  void set_positions(std::vector<Point2> positions);

  bool is_connected() const;
  std::vector<double> degrees() const;

  /// Graph with the same nodes and the subset of edges flagged in `active`.
  Graph subgraph(const std::vector<char>& active) const;

 private:
  void validate_edge(const Edge& e) const;

  int n_nodes_ = 0;
  std::vector<Edge> edges_;
  std::optional<std::vector<Point2>> positions_;
};

struct GeometricGraph {
  Graph graph;
  bool connected = false;
};

/// Random geometric graph in the unit square: nodes placed uniformly, unit
/// weight edge between nodes closer than radius_fraction * sqrt(2).
/// Disconnected results are returned as is with `connected == false`.
GeometricGraph generate_geometric_graph(int n, double radius_fraction,
                                        std::uint64_t seed);

/// Per-edge activation mask for one random edge sampling draw.
std::vector<char> sample_edge_mask(const Graph& g, Stream& rng);

/// One random edge sampling realization (same nodes, weights unchanged).
Graph sample_res(const Graph& g, Stream& rng);

void write_graph(std::ostream& out, const Graph& g,
                 const std::vector<std::string>& comment_lines = {});
Graph read_graph(std::istream& in);
void save_graph(const std::string& path, const Graph& g,
                const std::vector<std::string>& comment_lines = {});
Graph load_graph(const std::string& path);

// Small reference graphs used across tests and presets.
Graph path_graph(int n, double weight = 1.0, double p = 1.0);
Graph complete_graph(int n, double weight = 1.0, double p = 1.0);
Graph cycle_graph(int n, double weight = 1.0, double p = 1.0);

}  // namespace sgfl

#endif  // SGFL_GRAPH_HPP
