#include "sgfl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "sgfl/types.hpp"

namespace sgfl {

Graph::Graph(int n_nodes) : n_nodes_(n_nodes) {
  if (n_nodes < 1) throw Error("graph needs at least one node");
}

Graph::Graph(int n_nodes, std::vector<Edge> edges) : Graph(n_nodes) {
  for (const Edge& e : edges) add_edge(e.i, e.j, e.weight, e.p);
}

void Graph::validate_edge(const Edge& e) const {
  if (e.i < 0 || e.j < 0 || e.i >= n_nodes_ || e.j >= n_nodes_)
    throw Error("edge endpoint out of range");
  if (e.i == e.j) throw Error("self loop " + std::to_string(e.i));
  if (!(e.weight > 0.0)) throw Error("edge weight must be positive");
  if (!(e.p > 0.0 && e.p <= 1.0))
    throw Error("activation probability must lie in (0, 1]");
}

void Graph::add_edge(int i, int j, double weight, double p) {
  Edge e{std::min(i, j), std::max(i, j), weight, p};
  validate_edge(e);
  for (const Edge& other : edges_) {
    if (other.i == e.i && other.j == e.j)
      throw Error("duplicate edge " + std::to_string(e.i) + "-" + std::to_string(e.j));
  }
  edges_.push_back(e);
}

void Graph::set_uniform_probability(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("activation probability must lie in (0, 1]");
  for (Edge& e : edges_) e.p = p;
}

void Graph::set_probability(int edge_index, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("activation probability must lie in (0, 1]");
  edges_.at(static_cast<std::size_t>(edge_index)).p = p;
}

void Graph::set_positions(std::vector<Point2> positions) {
  if (static_cast<int>(positions.size()) != n_nodes_)
    throw Error("position count does not match node count");
  positions_ = std::move(positions);
}

bool Graph::is_connected() const {
  std::vector<int> parent(static_cast<std::size_t>(n_nodes_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  int components = n_nodes_;
  for (const Edge& e : edges_) {
    const int a = find(e.i), b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

std::vector<double> Graph::degrees() const {
  std::vector<double> d(static_cast<std::size_t>(n_nodes_), 0.0);
  for (const Edge& e : edges_) {
    d[e.i] += e.weight;
    d[e.j] += e.weight;
  }
  return d;
}

Graph Graph::subgraph(const std::vector<char>& active) const {
  if (active.size() != edges_.size()) throw Error("edge mask size mismatch");
  Graph out(n_nodes_);
  out.positions_ = positions_;
  for (std::size_t k = 0; k < edges_.size(); ++k)
    if (active[k]) out.edges_.push_back(edges_[k]);
  return out;
}

GeometricGraph generate_geometric_graph(int n, double radius_fraction,
                                        std::uint64_t seed) {
  if (n < 2) throw Error("geometric graph needs n >= 2");
  if (!(radius_fraction > 0.0 && radius_fraction <= 1.0))
    throw Error("radius fraction must lie in (0, 1]");
  Stream rng(seed, 0);
  std::vector<Point2> pts(static_cast<std::size_t>(n));
  for (Point2& pt : pts) {
    pt.x = rng.uniform();
    pt.y = rng.uniform();
  }
  const double threshold = radius_fraction * std::sqrt(2.0);
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
      if (std::hypot(dx, dy) <= threshold) g.add_edge(i, j, 1.0, 1.0);
    }
  }
  g.set_positions(std::move(pts));
  const bool connected = g.is_connected();
  return {std::move(g), connected};
}

std::vector<char> sample_edge_mask(const Graph& g, Stream& rng) {
  std::vector<char> mask(g.edges().size());
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const double p = g.edges()[k].p;
    // p == 1 edges consume no randomness so deterministic graphs stay cheap.
    mask[k] = p >= 1.0 ? 1 : static_cast<char>(rng.bernoulli(p));
  }
  return mask;
}

Graph sample_res(const Graph& g, Stream& rng) {
  return g.subgraph(sample_edge_mask(g, rng));
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_graph(std::ostream& out, const Graph& g,
                 const std::vector<std::string>& comment_lines) {
  for (const std::string& line : comment_lines) out << "# " << line << '\n';
  out << "nodes " << g.n_nodes() << '\n';
  if (g.positions()) {
    const auto& pts = *g.positions();
    for (int i = 0; i < g.n_nodes(); ++i)
      out << "pos " << i << ' ' << fmt17(pts[i].x) << ' ' << fmt17(pts[i].y) << '\n';
  }
  for (const Edge& e : g.edges())
    out << e.i << ' ' << e.j << ' ' << fmt17(e.weight) << ' ' << fmt17(e.p) << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  std::optional<Graph> g;
  std::vector<std::pair<int, Point2>> pos;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error("graph file line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head == "nodes") {
      int n = 0;
      if (g || !(ss >> n)) fail("bad or repeated 'nodes' header");
      g.emplace(n);
    } else if (head == "pos") {
      int i;
      Point2 pt;
      if (!(ss >> i >> pt.x >> pt.y)) fail("malformed pos line");
      pos.emplace_back(i, pt);
    } else {
      if (!g) fail("edge before 'nodes' header");
      int i = 0, j = 0;
      double w = 0.0, p = 0.0;
      std::istringstream es(line);
      if (!(es >> i >> j >> w >> p)) fail("malformed edge line");
      try {
        g->add_edge(i, j, w, p);
      } catch (const Error& e) {
        fail(e.what());
      }
    }
  }
  if (!g) throw Error("graph file has no 'nodes' header");
  if (!pos.empty()) {
    if (static_cast<int>(pos.size()) != g->n_nodes()) throw Error("incomplete pos lines");
    std::vector<Point2> pts(static_cast<std::size_t>(g->n_nodes()));
    std::vector<char> seen(pts.size(), 0);
    for (const auto& [i, pt] : pos) {
      if (i < 0 || i >= g->n_nodes() || seen[i]) throw Error("bad pos index");
      seen[i] = 1;
      pts[i] = pt;
    }
    g->set_positions(std::move(pts));
  }
  return std::move(*g);
}

void save_graph(const std::string& path, const Graph& g,
                const std::vector<std::string>& comment_lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_graph(out, g, comment_lines);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return read_graph(in);
}

Graph path_graph(int n, double weight, double p) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, weight, p);
  return g;
}

Graph complete_graph(int n, double weight, double p) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j, weight, p);
  return g;
}

Graph cycle_graph(int n, double weight, double p) {
  Graph g = path_graph(n, weight, p);
  if (n > 2) g.add_edge(n - 1, 0, weight, p);
  return g;
}

}  // namespace sgfl
