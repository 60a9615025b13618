#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "core/error.hpp"

namespace rproc {

Graph::Graph(std::vector<std::string> names, std::vector<Edge> edges)
    : names_(std::move(names)), edges_(std::move(edges)) {
  const Index n = num_vertices();
  require(n >= 1, "graph needs at least one vertex");
  {
    std::set<std::string> seen(names_.begin(), names_.end());
    require(static_cast<Index>(seen.size()) == n, "duplicate vertex names");
  }
  adjacency_.assign(static_cast<std::size_t>(n), {});
  std::set<std::pair<Index, Index>> seen;
  for (Edge& e : edges_) {
    require(e.u >= 0 && e.u < n && e.v >= 0 && e.v < n,
            "edge endpoint out of range", ErrorCode::kOutOfRange);
    require(e.u != e.v, "self-loops are not allowed in a base graph");
    require(std::isfinite(e.weight) && e.weight > 0.0,
            "edge weights must be strictly positive");
    if (e.u > e.v) std::swap(e.u, e.v);
    require(seen.emplace(e.u, e.v).second, "parallel edges are not allowed");
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<Index> stack{0};
  reached[0] = true;
  Index count = 1;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index w : adjacency_[v]) {
      if (!reached[w]) {
        reached[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  require(count == n, "graph must be connected");
}

Index Graph::max_degree() const {
  Index d = 0;
  for (const auto& adj : adjacency_) d = std::max(d, static_cast<Index>(adj.size()));
  return d;
}

Index Graph::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  require(it != names_.end(), "unknown vertex '" + name + "'",
          ErrorCode::kOutOfRange);
  return static_cast<Index>(it - names_.begin());
}

WeightMatrix Graph::weight_matrix() const {
  Matrix m = Matrix::Zero(num_vertices(), num_vertices());
  for (const Edge& e : edges_) {
    m(e.u, e.v) = e.weight;
    m(e.v, e.u) = e.weight;
  }
  return WeightMatrix(std::move(m));
}

SubVertex SubVertex::on_edge(Index edge, std::uint64_t num, unsigned level) {
  require(level < 63, "subdivision level too large", ErrorCode::kOutOfRange);
  require(num > 0 && num < (std::uint64_t{1} << level),
          "position must lie strictly inside the edge", ErrorCode::kOutOfRange);
  while (num % 2 == 0) {
    num /= 2;
    --level;
  }
  return {-1, edge, num, level};
}

SubdividedGraph::SubdividedGraph(const Graph& base, unsigned r)
    : base_(base), r_(r) {
  require(r < 31, "subdivision level too large", ErrorCode::kOutOfRange);
  const std::uint64_t pieces = std::uint64_t{1} << r;
  const Index n = base_.num_vertices();
  const Index m = base_.num_edges();
  vertices_.reserve(static_cast<std::size_t>(n + m * static_cast<Index>(pieces - 1)));
  for (Index v = 0; v < n; ++v) vertices_.push_back(SubVertex::base_vertex(v));
  for (Index e = 0; e < m; ++e) {
    for (std::uint64_t j = 1; j < pieces; ++j) {
      vertices_.push_back(SubVertex::on_edge(e, j, r));
    }
  }
  for (Index i = 0; i < num_vertices(); ++i) index_.emplace(vertices_[i], i);

  adjacency_.assign(vertices_.size(), {});
  edges_.reserve(static_cast<std::size_t>(m * static_cast<Index>(pieces)));
  for (Index e = 0; e < m; ++e) {
    for (std::uint64_t j = 1; j <= pieces; ++j) {
      const SubEdge se{e, j, r};
      edges_.push_back(se);
      const auto [a, b] = endpoints(se);
      const Index ia = index_of(a);
      const Index ib = index_of(b);
      adjacency_[ia].push_back(ib);
      adjacency_[ib].push_back(ia);
    }
  }
}

Index SubdividedGraph::index_of(const SubVertex& v) const {
  const auto it = index_.find(v);
  require(it != index_.end(), "vertex is not part of this subdivision",
          ErrorCode::kOutOfRange);
  return it->second;
}

Index SubdividedGraph::edge_index(const SubEdge& e) const {
  require(e.level == r_, "edge index is defined for level-r edges only",
          ErrorCode::kOutOfRange);
  require(e.edge >= 0 && e.edge < base_.num_edges() && e.j >= 1 &&
              e.j <= (std::uint64_t{1} << r_),
          "edge is not part of this subdivision", ErrorCode::kOutOfRange);
  return e.edge * static_cast<Index>(std::uint64_t{1} << r_) +
         static_cast<Index>(e.j - 1);
}

SubVertex SubdividedGraph::point(Index edge, std::uint64_t num,
                                 unsigned level) const {
  require(edge >= 0 && edge < base_.num_edges(), "base edge out of range",
          ErrorCode::kOutOfRange);
  const std::uint64_t den = std::uint64_t{1} << level;
  require(num <= den, "position beyond the edge end", ErrorCode::kOutOfRange);
  const Edge& be = base_.edges()[static_cast<std::size_t>(edge)];
  if (num == 0) return SubVertex::base_vertex(be.u);
  if (num == den) return SubVertex::base_vertex(be.v);
  return SubVertex::on_edge(edge, num, level);
}

std::pair<SubVertex, SubVertex> SubdividedGraph::endpoints(
    const SubEdge& e) const {
  require(e.j >= 1 && e.j <= (std::uint64_t{1} << e.level),
          "edge index j out of range", ErrorCode::kOutOfRange);
  return {point(e.edge, e.j - 1, e.level), point(e.edge, e.j, e.level)};
}

bool SubdividedGraph::in_level(const SubVertex& v, unsigned l) const {
  return v.min_level() <= l;
}

IndexSet SubdividedGraph::level_vertices(unsigned l) const {
  IndexSet out;
  for (Index i = 0; i < num_vertices(); ++i) {
    if (in_level(vertices_[i], l)) out.push_back(i);
  }
  return out;
}

Split SubdividedGraph::split(unsigned l, const SubEdge& parent) const {
  require(l >= 1 && l <= r_, "split level must lie in 1..r",
          ErrorCode::kOutOfRange);
  require(parent.level == l - 1, "edge is not an edge of E_{l-1}",
          ErrorCode::kOutOfRange);
  require(parent.edge >= 0 && parent.edge < base_.num_edges() &&
              parent.j >= 1 && parent.j <= (std::uint64_t{1} << (l - 1)),
          "edge is not an edge of E_{l-1}", ErrorCode::kOutOfRange);
  const std::uint64_t j = parent.j;
  return {SubEdge{parent.edge, 2 * j - 1, l}, SubEdge{parent.edge, 2 * j, l},
          SubVertex::on_edge(parent.edge, 2 * j - 1, l)};
}

Survivor SubdividedGraph::survivor(unsigned l, const SubVertex& v) const {
  require(l >= 2 && l <= r_, "survivor level must lie in 2..r",
          ErrorCode::kOutOfRange);
  require(!v.is_base(), "vertex belongs to Lambda_0", ErrorCode::kOutOfRange);
  require(v.level <= l - 1, "vertex is not in Lambda_{l-1}",
          ErrorCode::kOutOfRange);
  require(v.edge >= 0 && v.edge < base_.num_edges(), "base edge out of range",
          ErrorCode::kOutOfRange);
  const std::uint64_t j = v.num << (l - 1 - v.level);
  return {SubEdge{v.edge, 2 * j, l}, SubEdge{v.edge, 2 * j + 1, l},
          SubVertex::on_edge(v.edge, 2 * j - 1, l),
          SubVertex::on_edge(v.edge, 2 * j + 1, l)};
}

WeightMatrix SubdividedGraph::weight_matrix(
    const std::vector<double>& edge_weights) const {
  require(num_vertices() <= kDenseLimit,
          "subdivision too large for a dense weight matrix",
          ErrorCode::kOutOfRange);
  require(static_cast<Index>(edge_weights.size()) == num_edges(),
          "need one weight per edge of E_r");
  Matrix m = Matrix::Zero(num_vertices(), num_vertices());
  for (Index k = 0; k < num_edges(); ++k) {
    const double w = edge_weights[static_cast<std::size_t>(k)];
    require(std::isfinite(w) && w > 0.0, "edge weights must be positive");
    const auto [a, b] = endpoints(edges_[static_cast<std::size_t>(k)]);
    const Index ia = index_of(a);
    const Index ib = index_of(b);
    m(ia, ib) = w;
    m(ib, ia) = w;
  }
  return WeightMatrix(std::move(m));
}

std::vector<double> SubdividedGraph::inherited_weights() const {
  std::vector<double> out;
  out.reserve(edges_.size());
  for (const SubEdge& e : edges_) {
    out.push_back(base_.edges()[static_cast<std::size_t>(e.edge)].weight);
  }
  return out;
}

std::string SubdividedGraph::vertex_name(Index v) const {
  const SubVertex& sv = vertices_[static_cast<std::size_t>(v)];
  if (sv.is_base()) return base_.names()[static_cast<std::size_t>(sv.base)];
  const std::uint64_t j = sv.num << (r_ - sv.level);
  return "e:" + std::to_string(sv.edge) + ":" + std::to_string(j) + "/" +
         std::to_string(std::uint64_t{1} << r_);
}

Graph SubdividedGraph::as_graph(const std::vector<double>& edge_weights) const {
  require(static_cast<Index>(edge_weights.size()) == num_edges(),
          "need one weight per edge of E_r");
  std::vector<std::string> names;
  names.reserve(vertices_.size());
  for (Index v = 0; v < num_vertices(); ++v) names.push_back(vertex_name(v));
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (Index k = 0; k < num_edges(); ++k) {
    const auto [a, b] = endpoints(edges_[static_cast<std::size_t>(k)]);
    edges.push_back({index_of(a), index_of(b), edge_weights[static_cast<std::size_t>(k)]});
  }
  return Graph(std::move(names), std::move(edges));
}

}  // namespace rproc
