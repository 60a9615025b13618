#pragma once

// Finite weighted graphs and their 2^r subdivisions.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/weights.hpp"

namespace rproc {

struct Edge {
  Index u = 0;  // u < v; the bookkeeping direction runs from u to v
  Index v = 0;
  double weight = 1.0;
};

class Graph {
 public:
  Graph() = default;
  // Validates: no self-loops, no parallel edges, positive finite weights,
  // connected. Each edge is reoriented so that u < v.
  Graph(std::vector<std::string> names, std::vector<Edge> edges);

  Index num_vertices() const { return static_cast<Index>(names_.size()); }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Index>& neighbors(Index v) const { return adjacency_[v]; }
  Index degree(Index v) const { return static_cast<Index>(adjacency_[v].size()); }
  Index max_degree() const;
  Index index_of(const std::string& name) const;

  WeightMatrix weight_matrix() const;

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adjacency_;
};

// A vertex of some subdivision. Base vertices carry their index; a
// subdivision vertex v_{e, num / 2^level} carries the base edge and the
// dyadic position reduced to lowest terms, so the same point compares equal
// in every Lambda_l that contains it.
struct SubVertex {
  Index base = -1;  // >= 0 for base vertices
  Index edge = -1;
  std::uint64_t num = 0;
  unsigned level = 0;

  static SubVertex base_vertex(Index v) { return {v, -1, 0, 0}; }
  // Position num / 2^level strictly inside the edge; reduced on construction.
  static SubVertex on_edge(Index edge, std::uint64_t num, unsigned level);

  bool is_base() const { return base >= 0; }
  // Smallest l with this vertex in Lambda_l.
  unsigned min_level() const { return is_base() ? 0 : level; }

  auto operator<=>(const SubVertex&) const = default;
};

// The edge e_{j,l} = {v_{e,(j-1)/2^l}, v_{e,j/2^l}} of level l on base edge e.
struct SubEdge {
  Index edge = 0;
  std::uint64_t j = 1;
  unsigned level = 0;

  auto operator<=>(const SubEdge&) const = default;
};

struct Split {
  SubEdge first;   // e' = e_{2j-1,l}
  SubEdge second;  // e'' = e_{2j,l}
  SubVertex midpoint;
};

struct Survivor {
  SubEdge left;   // e^1 = e_{2j,l}
  SubEdge right;  // e^2 = e_{2j+1,l}
  SubVertex left_neighbor;   // v^1
  SubVertex right_neighbor;  // v^2
};

class SubdividedGraph {
 public:
  // Matrices above this many vertices are not materialized densely.
  static constexpr Index kDenseLimit = 4096;

  SubdividedGraph(const Graph& base, unsigned r);

  const Graph& base() const { return base_; }
  unsigned level() const { return r_; }
  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }

  // Vertices of Lambda_r: base vertices first (same indices as in the base
  // graph), then the interior points edge by edge in increasing position.
  const std::vector<SubVertex>& vertices() const { return vertices_; }
  // Edges of E_r, ordered by base edge then j.
  const std::vector<SubEdge>& edges() const { return edges_; }
  Index index_of(const SubVertex& v) const;
  Index edge_index(const SubEdge& e) const;  // position in edges() at level r

  // v_{e, num/2^level} for 0 <= num <= 2^level; endpoints map to base vertices.
  SubVertex point(Index edge, std::uint64_t num, unsigned level) const;
  std::pair<SubVertex, SubVertex> endpoints(const SubEdge& e) const;
  bool in_level(const SubVertex& v, unsigned l) const;
  // Indices (into vertices()) of Lambda_l, ascending.
  IndexSet level_vertices(unsigned l) const;

  Split split(unsigned l, const SubEdge& parent) const;
  Survivor survivor(unsigned l, const SubVertex& v) const;

  const std::vector<Index>& neighbors(Index v) const { return adjacency_[v]; }
  Index degree(Index v) const { return static_cast<Index>(adjacency_[v].size()); }

  // Dense W over Lambda_r from one weight per edge of E_r.
  WeightMatrix weight_matrix(const std::vector<double>& edge_weights) const;
  // Each sub-edge inherits the weight of its base edge.
  std::vector<double> inherited_weights() const;

  std::string vertex_name(Index v) const;
  // The level-r graph as a plain Graph with synthesized vertex names.
  Graph as_graph(const std::vector<double>& edge_weights) const;

 private:
  Graph base_;
  unsigned r_;
  std::vector<SubVertex> vertices_;
  std::vector<SubEdge> edges_;
  std::map<SubVertex, Index> index_;
  std::vector<std::vector<Index>> adjacency_;
};

}  // namespace rproc
