#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace perco {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;

struct Incidence {
  Vertex neighbor;
  EdgeId edge;
};

/// Immutable undirected multigraph in compressed adjacency form.
///
/// Vertex ids are dense in [0, n), edge ids dense in [0, m). Each vertex's
/// incidence list is sorted by neighbor id (ties by edge id), so every
/// traversal below visits vertices in a deterministic order.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an edge list. Endpoints are canonicalized to u <= v
  /// and edge ids follow input order. Self-loops are rejected; repeated
  /// pairs are rejected unless `allow_parallel` is set.
  static Graph from_edges(int vertex_count, std::vector<std::pair<Vertex, Vertex>> edges,
                          bool allow_parallel = false);

  int vertex_count() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }

  std::span<const Incidence> neighbors(Vertex v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  int degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::pair<Vertex, Vertex> endpoints(EdgeId e) const noexcept { return edges_[e]; }
  std::span<const std::pair<Vertex, Vertex>> edges() const noexcept { return edges_; }

  /// Number of edges joining u and v.
  int multiplicity(Vertex u, Vertex v) const noexcept;
  bool adjacent(Vertex u, Vertex v) const noexcept { return multiplicity(u, v) > 0; }

  /// Common degree if every vertex has the same degree.
  std::optional<int> regular_degree() const noexcept;
  int max_degree() const noexcept;

  bool contains(Vertex v) const noexcept { return v >= 0 && v < vertex_count(); }

  /// Number of connected components (isolated vertices count).
  int component_count() const;

 private:
  std::vector<int> offsets_{0};
  std::vector<Incidence> adjacency_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
};

/// Membership bitmap plus insertion-ordered member list over a fixed universe.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int universe) : member_(static_cast<std::size_t>(universe), 0) {}
  VertexSet(int universe, std::span<const Vertex> vertices);

  bool contains(Vertex v) const noexcept {
    return v >= 0 && static_cast<std::size_t>(v) < member_.size() && member_[v] != 0;
  }
  /// Returns false if already present.
  bool insert(Vertex v);

  int size() const noexcept { return static_cast<int>(members_.size()); }
  bool empty() const noexcept { return members_.empty(); }
  int universe() const noexcept { return static_cast<int>(member_.size()); }
  std::span<const Vertex> members() const noexcept { return members_; }

 private:
  std::vector<char> member_;
  std::vector<Vertex> members_;
};

/// The ball B(v, R) as an induced subgraph, relabeled in BFS order so the
/// root is vertex 0 and distances are non-decreasing in vertex id.
struct RootedBall {
  Graph graph;
  Vertex root = 0;
  int radius = 0;
  std::vector<int> dist;
  std::vector<Vertex> boundary;
  /// Vertex id in the source graph; identity for generated balls.
  std::vector<Vertex> origin;

  bool interior(Vertex v) const noexcept { return dist[v] < radius; }
  int interior_count() const noexcept {
    return static_cast<int>(dist.size() - boundary.size());
  }

  /// Throws std::logic_error if a structural invariant is broken.
  void check_invariants() const;
};

struct GirthResult {
  std::optional<int> length;  // nullopt: the graph is a forest

  bool acyclic() const noexcept { return !length.has_value(); }
  friend bool operator==(const GirthResult&, const GirthResult&) = default;
};

GirthResult girth(const Graph& g);

/// Throws std::invalid_argument for an invalid vertex or negative radius.
RootedBall ball(const Graph& g, Vertex v, int radius);

/// Exact rooted isomorphism test by backtracking over candidates that share
/// a colour-refinement class seeded with (distance, degree). Meant for balls
/// up to about 1e4 vertices. Throws std::invalid_argument on radius mismatch.
bool rooted_isomorphic(const RootedBall& a, const RootedBall& b);

/// Fraction of vertices whose R-ball is acyclic, i.e. isomorphic to the
/// R-ball of the d-regular tree. Requires a regular graph.
double local_tree_fraction(const Graph& g, int radius);

struct PathCount {
  std::int64_t count = 0;
  std::int64_t total = 0;
  friend bool operator==(const PathCount&, const PathCount&) = default;
};

/// Enumerates the non-backtracking paths of `length` steps that start at u
/// and whose first step is not `forbidden_first`. `count` is the number of
/// them whose vertices after u all avoid `avoid`.
///
/// If `known_girth` is given and the length exceeds ceil(g/2) - 1, the
/// neighbourhood is not guaranteed to be a tree and std::invalid_argument is
/// thrown.
PathCount count_nb_paths_avoiding(const Graph& g, Vertex u, Vertex forbidden_first, int length,
                                  const VertexSet& avoid,
                                  std::optional<GirthResult> known_girth = std::nullopt);

/// Plain-text edge list: "n m" followed by m lines "u v".
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in, bool allow_parallel = false);

}  // namespace perco
