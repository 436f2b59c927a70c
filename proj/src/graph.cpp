#include "perco/graph.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace perco {

Graph Graph::from_edges(int vertex_count, std::vector<std::pair<Vertex, Vertex>> edges,
                        bool allow_parallel) {
  if (vertex_count < 0) throw std::invalid_argument("negative vertex count");
  Graph g;
  std::vector<int> deg(static_cast<std::size_t>(vertex_count), 0);
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(u) + " " +
                                  std::to_string(v));
    if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
    ++deg[u];
    ++deg[v];
  }
  g.offsets_.assign(static_cast<std::size_t>(vertex_count) + 1, 0);
  for (int v = 0; v < vertex_count; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.adjacency_.resize(static_cast<std::size_t>(g.offsets_.back()));
  std::vector<int> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    g.adjacency_[fill[u]++] = {v, static_cast<EdgeId>(e)};
    g.adjacency_[fill[v]++] = {u, static_cast<EdgeId>(e)};
  }
  for (int v = 0; v < vertex_count; ++v) {
    auto first = g.adjacency_.begin() + g.offsets_[v];
    auto last = g.adjacency_.begin() + g.offsets_[v + 1];
    std::sort(first, last, [](const Incidence& a, const Incidence& b) {
      return a.neighbor != b.neighbor ? a.neighbor < b.neighbor : a.edge < b.edge;
    });
    if (!allow_parallel) {
      for (auto it = first; it != last && it + 1 != last; ++it)
        if (it->neighbor == (it + 1)->neighbor)
          throw std::invalid_argument("parallel edge between " + std::to_string(v) + " and " +
                                      std::to_string(it->neighbor));
    }
  }
  g.edges_ = std::move(edges);
  return g;
}

int Graph::multiplicity(Vertex u, Vertex v) const noexcept {
  if (!contains(u) || !contains(v)) return 0;
  auto nb = neighbors(u);
  auto [lo, hi] = std::equal_range(
      nb.begin(), nb.end(), Incidence{v, 0},
      [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
  return static_cast<int>(hi - lo);
}

std::optional<int> Graph::regular_degree() const noexcept {
  if (vertex_count() == 0) return std::nullopt;
  const int d = degree(0);
  for (Vertex v = 1; v < vertex_count(); ++v)
    if (degree(v) != d) return std::nullopt;
  return d;
}

int Graph::max_degree() const noexcept {
  int best = 0;
  for (Vertex v = 0; v < vertex_count(); ++v) best = std::max(best, degree(v));
  return best;
}

int Graph::component_count() const {
  const int n = vertex_count();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Vertex> stack;
  int components = 0;
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (const auto& inc : neighbors(x))
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = 1;
          stack.push_back(inc.neighbor);
        }
    }
  }
  return components;
}

VertexSet::VertexSet(int universe, std::span<const Vertex> vertices) : VertexSet(universe) {
  for (Vertex v : vertices) insert(v);
}

bool VertexSet::insert(Vertex v) {
  if (v < 0 || static_cast<std::size_t>(v) >= member_.size())
    throw std::invalid_argument("vertex " + std::to_string(v) + " outside set universe");
  if (member_[v]) return false;
  member_[v] = 1;
  members_.push_back(v);
  return true;
}

void RootedBall::check_invariants() const {
  const int n = graph.vertex_count();
  if (static_cast<int>(dist.size()) != n || static_cast<int>(origin.size()) != n)
    throw std::logic_error("ball label arrays do not match vertex count");
  if (n == 0 || dist[root] != 0) throw std::logic_error("ball root must have distance 0");
  int boundary_seen = 0;
  for (Vertex v = 0; v < n; ++v) {
    if (dist[v] < 0 || dist[v] > radius) throw std::logic_error("distance label out of range");
    if (dist[v] == radius) ++boundary_seen;
    if (v == root) continue;
    bool has_parent = false;
    for (const auto& inc : graph.neighbors(v)) has_parent |= dist[inc.neighbor] == dist[v] - 1;
    if (!has_parent) throw std::logic_error("vertex without a parent one level closer");
  }
  if (boundary_seen != static_cast<int>(boundary.size()))
    throw std::logic_error("boundary list does not match distance labels");
}

namespace {

// Shortest cycle through BFS from one source, ignoring cycles not shorter
// than `best`. Returns `best` when nothing shorter is found.
int shortest_cycle_from(const Graph& g, Vertex source, int best, std::vector<int>& dist,
                        std::vector<EdgeId>& parent_edge, std::vector<Vertex>& queue) {
  queue.clear();
  queue.push_back(source);
  dist[source] = 0;
  parent_edge[source] = -1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex x = queue[head];
    // A cycle found below here has length at least 2*dist[x] + 1.
    if (2 * dist[x] + 1 >= best) break;
    for (const auto& inc : g.neighbors(x)) {
      if (inc.edge == parent_edge[x]) continue;
      const Vertex y = inc.neighbor;
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        parent_edge[y] = inc.edge;
        queue.push_back(y);
      } else {
        best = std::min(best, dist[x] + dist[y] + 1);
      }
    }
  }
  for (Vertex v : queue) dist[v] = -1;
  return best;
}

}  // namespace

GirthResult girth(const Graph& g) {
  const int n = g.vertex_count();
  constexpr int kNone = std::numeric_limits<int>::max();
  int best = kNone;
#pragma omp parallel reduction(min : best)
  {
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::vector<EdgeId> parent_edge(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> queue;
    queue.reserve(static_cast<std::size_t>(n));
    int local = kNone;
#pragma omp for schedule(dynamic, 64)
    for (Vertex s = 0; s < n; ++s) local = shortest_cycle_from(g, s, local, dist, parent_edge, queue);
    best = std::min(best, local);
  }
  if (best == kNone) return {};
  return {best};
}

RootedBall ball(const Graph& g, Vertex v, int radius) {
  if (!g.contains(v)) throw std::invalid_argument("ball: invalid vertex " + std::to_string(v));
  if (radius < 0) throw std::invalid_argument("ball: negative radius");
  std::vector<int> local_id(static_cast<std::size_t>(g.vertex_count()), -1);
  RootedBall b;
  b.radius = radius;
  b.origin.push_back(v);
  b.dist.push_back(0);
  local_id[v] = 0;
  for (std::size_t head = 0; head < b.origin.size(); ++head) {
    const Vertex x = b.origin[head];
    if (b.dist[head] == radius) continue;
    for (const auto& inc : g.neighbors(x)) {
      if (local_id[inc.neighbor] >= 0) continue;
      local_id[inc.neighbor] = static_cast<int>(b.origin.size());
      b.origin.push_back(inc.neighbor);
      b.dist.push_back(b.dist[head] + 1);
    }
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t i = 0; i < b.origin.size(); ++i)
    for (const auto& inc : g.neighbors(b.origin[i])) {
      const int j = local_id[inc.neighbor];
      if (j > static_cast<int>(i)) edges.emplace_back(static_cast<Vertex>(i), j);
    }
  for (std::size_t i = 0; i < b.origin.size(); ++i)
    if (b.dist[i] == radius) b.boundary.push_back(static_cast<Vertex>(i));
  b.graph = Graph::from_edges(static_cast<int>(b.origin.size()), std::move(edges), true);
  return b;
}

namespace {

// Joint colour refinement over both balls. Colours are comparable across
// the two graphs because the class dictionary is shared.
std::pair<std::vector<int>, std::vector<int>> refine_colours(const RootedBall& a,
                                                             const RootedBall& b) {
  using Signature = std::vector<int>;
  auto initial = [](const RootedBall& r) {
    std::vector<Signature> sig(r.dist.size());
    for (std::size_t v = 0; v < sig.size(); ++v)
      sig[v] = {r.dist[v], r.graph.degree(static_cast<Vertex>(v))};
    return sig;
  };
  auto assign = [](const std::vector<Signature>& sa, const std::vector<Signature>& sb,
                   std::vector<int>& ca, std::vector<int>& cb) {
    std::map<Signature, int> ids;
    for (const auto& s : sa) ids.emplace(s, 0);
    for (const auto& s : sb) ids.emplace(s, 0);
    int next = 0;
    for (auto& [sig, id] : ids) id = next++;
    ca.resize(sa.size());
    cb.resize(sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) ca[i] = ids[sa[i]];
    for (std::size_t i = 0; i < sb.size(); ++i) cb[i] = ids[sb[i]];
    return next;
  };
  std::vector<int> ca, cb;
  int classes = assign(initial(a), initial(b), ca, cb);
  auto step = [](const RootedBall& r, const std::vector<int>& colour) {
    std::vector<Signature> sig(colour.size());
    for (std::size_t v = 0; v < sig.size(); ++v) {
      Signature s{colour[v]};
      for (const auto& inc : r.graph.neighbors(static_cast<Vertex>(v)))
        s.push_back(colour[inc.neighbor]);
      std::sort(s.begin() + 1, s.end());
      sig[v] = std::move(s);
    }
    return sig;
  };
  for (;;) {
    std::vector<int> na, nb;
    const int next_classes = assign(step(a, ca), step(b, cb), na, nb);
    ca = std::move(na);
    cb = std::move(nb);
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return {std::move(ca), std::move(cb)};
}

class IsomorphismSearch {
 public:
  IsomorphismSearch(const RootedBall& a, const RootedBall& b, std::vector<int> colour_a,
                    std::vector<int> colour_b)
      : a_(a), b_(b), colour_a_(std::move(colour_a)), colour_b_(std::move(colour_b)),
        map_(a.dist.size(), -1), inverse_(b.dist.size(), -1) {
    for (std::size_t w = 0; w < colour_b_.size(); ++w)
      by_colour_[colour_b_[w]].push_back(static_cast<Vertex>(w));
    order_.resize(a.dist.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](Vertex x, Vertex y) { return a.dist[x] < a.dist[y]; });
  }

  bool run() {
    if (!assign(a_.root, b_.root)) return false;
    const bool ok = extend(1);
    return ok;
  }

 private:
  bool consistent(Vertex v, Vertex w) const {
    int mapped_a = 0;
    for (const auto& inc : a_.graph.neighbors(v)) {
      const Vertex image = map_[inc.neighbor];
      if (image < 0) continue;
      ++mapped_a;
      if (!b_.graph.adjacent(w, image)) return false;
      if (a_.graph.multiplicity(v, inc.neighbor) != b_.graph.multiplicity(w, image)) return false;
    }
    int mapped_b = 0;
    for (const auto& inc : b_.graph.neighbors(w)) mapped_b += inverse_[inc.neighbor] >= 0;
    return mapped_a == mapped_b;
  }

  bool assign(Vertex v, Vertex w) {
    if (colour_a_[v] != colour_b_[w] || inverse_[w] >= 0 || !consistent(v, w)) return false;
    map_[v] = w;
    inverse_[w] = v;
    return true;
  }

  void unassign(Vertex v) {
    inverse_[map_[v]] = -1;
    map_[v] = -1;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const Vertex v = order_[depth];
    if (map_[v] >= 0) return extend(depth + 1);
    // Prefer candidates adjacent to the image of an already-mapped neighbour.
    const std::vector<Vertex>* candidates = &by_colour_.at(colour_a_[v]);
    std::vector<Vertex> local;
    for (const auto& inc : a_.graph.neighbors(v)) {
      if (map_[inc.neighbor] < 0) continue;
      for (const auto& binc : b_.graph.neighbors(map_[inc.neighbor]))
        if (colour_b_[binc.neighbor] == colour_a_[v]) local.push_back(binc.neighbor);
      candidates = &local;
      break;
    }
    for (Vertex w : *candidates) {
      if (!assign(v, w)) continue;
      if (extend(depth + 1)) return true;
      unassign(v);
    }
    return false;
  }

  const RootedBall& a_;
  const RootedBall& b_;
  std::vector<int> colour_a_, colour_b_;
  std::vector<Vertex> map_, inverse_;
  std::vector<Vertex> order_;
  std::map<int, std::vector<Vertex>> by_colour_;
};

}  // namespace

bool rooted_isomorphic(const RootedBall& a, const RootedBall& b) {
  if (a.radius != b.radius) throw std::invalid_argument("rooted_isomorphic: radius mismatch");
  if (a.graph.vertex_count() != b.graph.vertex_count() ||
      a.graph.edge_count() != b.graph.edge_count())
    return false;
  auto [ca, cb] = refine_colours(a, b);
  if (ca[a.root] != cb[b.root]) return false;
  std::vector<int> ha(ca), hb(cb);
  std::sort(ha.begin(), ha.end());
  std::sort(hb.begin(), hb.end());
  if (ha != hb) return false;
  return IsomorphismSearch(a, b, std::move(ca), std::move(cb)).run();
}

double local_tree_fraction(const Graph& g, int radius) {
  if (!g.regular_degree()) throw std::invalid_argument("local_tree_fraction: graph not regular");
  if (radius < 0) throw std::invalid_argument("local_tree_fraction: negative radius");
  const int n = g.vertex_count();
  long long acyclic = 0;
#pragma omp parallel reduction(+ : acyclic)
  {
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::vector<EdgeId> parent_edge(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> queue;
#pragma omp for schedule(dynamic, 256)
    for (Vertex s = 0; s < n; ++s) {
      queue.assign(1, s);
      dist[s] = 0;
      parent_edge[s] = -1;
      bool tree = true;
      for (std::size_t head = 0; head < queue.size() && tree; ++head) {
        const Vertex x = queue[head];
        for (const auto& inc : g.neighbors(x)) {
          if (inc.edge == parent_edge[x]) continue;
          const Vertex y = inc.neighbor;
          if (dist[y] >= 0) {
            // Any non-tree edge inside the ball closes a cycle.
            tree = false;
            break;
          }
          if (dist[x] == radius) continue;
          dist[y] = dist[x] + 1;
          parent_edge[y] = inc.edge;
          queue.push_back(y);
        }
      }
      acyclic += tree ? 1 : 0;
      for (Vertex v : queue) dist[v] = -1;
    }
  }
  return n == 0 ? 1.0 : static_cast<double>(acyclic) / n;
}

namespace {

void enumerate_paths(const Graph& g, Vertex at, EdgeId via, int remaining, bool clean,
                     const VertexSet& avoid, PathCount& out) {
  if (remaining == 0) {
    ++out.total;
    out.count += clean ? 1 : 0;
    return;
  }
  for (const auto& inc : g.neighbors(at)) {
    if (inc.edge == via) continue;
    enumerate_paths(g, inc.neighbor, inc.edge, remaining - 1,
                    clean && !avoid.contains(inc.neighbor), avoid, out);
  }
}

}  // namespace

PathCount count_nb_paths_avoiding(const Graph& g, Vertex u, Vertex forbidden_first, int length,
                                  const VertexSet& avoid, std::optional<GirthResult> known_girth) {
  if (!g.contains(u) || !g.adjacent(u, forbidden_first))
    throw std::invalid_argument("count_nb_paths_avoiding: forbidden_first is not adjacent to u");
  if (length < 0) throw std::invalid_argument("count_nb_paths_avoiding: negative length");
  if (known_girth && known_girth->length && length > (*known_girth->length + 1) / 2 - 1)
    throw std::invalid_argument("count_nb_paths_avoiding: length exceeds the tree radius " +
                                std::to_string((*known_girth->length + 1) / 2 - 1));
  PathCount out;
  if (length == 0) return {1, 1};
  for (const auto& inc : g.neighbors(u)) {
    if (inc.neighbor == forbidden_first) continue;
    enumerate_paths(g, inc.neighbor, inc.edge, length - 1, !avoid.contains(inc.neighbor), avoid,
                    out);
  }
  return out;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in, bool allow_parallel) {
  long long n = 0, m = 0;
  if (!(in >> n >> m) || n < 0 || m < 0 || n > std::numeric_limits<Vertex>::max())
    throw std::invalid_argument("edge list: malformed header");
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u = 0, v = 0;
    if (!(in >> u >> v)) throw std::invalid_argument("edge list: truncated at edge " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("edge list: endpoint out of range at edge " + std::to_string(i));
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return Graph::from_edges(static_cast<int>(n), std::move(edges), allow_parallel);
}

}  // namespace perco
