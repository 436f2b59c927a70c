#include "perco/generators.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "perco/rng.hpp"

namespace perco {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 6> kFamilyNames{{
    {Family::tree_ball, "tree_ball"},
    {Family::random_regular, "random_regular"},
    {Family::torus, "torus"},
    {Family::slab, "slab"},
    {Family::triangular_torus, "triangular_torus"},
    {Family::free_product_ball, "free_product_ball"},
}};

int slab_interior_degree(int k, const std::vector<int>& sides) {
  int d = 2 * k;
  for (int s : sides) d += s >= 3 ? 2 : (s == 2 ? 1 : 0);
  return d;
}

}  // namespace

std::string_view family_name(Family f) noexcept {
  for (const auto& [family, name] : kFamilyNames)
    if (family == f) return name;
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (const auto& [family, n] : kFamilyNames)
    if (n == name) return family;
  throw std::invalid_argument("unknown generator family '" + std::string(name) + "'");
}

std::vector<std::string> validate(const GeneratorSpec& spec) {
  std::vector<std::string> v;
  const auto& p = spec.parameters;
  auto arity = [&](std::size_t n) {
    if (p.size() != n) {
      v.push_back(std::string(family_name(spec.family)) + ": expected " + std::to_string(n) +
                  " parameters, got " + std::to_string(p.size()));
      return false;
    }
    return true;
  };
  switch (spec.family) {
    case Family::tree_ball:
      if (arity(2)) {
        if (p[0] < 3) v.emplace_back("generators.tree_ball: requires d >= 3");
        if (p[1] < 0) v.emplace_back("generators.tree_ball: requires R >= 0");
      }
      break;
    case Family::random_regular:
      if (arity(2)) {
        const auto n = static_cast<long long>(p[0]), d = static_cast<long long>(p[1]);
        if (d < 3) v.emplace_back("generators.random_regular: requires d >= 3");
        if (n <= d) v.emplace_back("generators.random_regular: requires n > d");
        if ((n * d) % 2 != 0) v.emplace_back("generators.random_regular: n*d must be even");
      }
      break;
    case Family::torus:
      if (p.empty()) v.emplace_back("generators.torus: requires at least one side");
      for (int s : p)
        if (s < 3) v.push_back("generators.torus: side " + std::to_string(s) + " < 3");
      break;
    case Family::slab:
      if (p.size() < 2) {
        v.emplace_back("generators.slab: requires parameters [k, L, sides...]");
        break;
      }
      if (p[0] < 1) v.emplace_back("generators.slab: requires k >= 1");
      if (p[1] < 2) v.emplace_back("generators.slab: requires L >= 2");
      for (std::size_t i = 2; i < p.size(); ++i)
        if (p[i] < 1) v.push_back("generators.slab: periodic side " + std::to_string(p[i]) + " < 1");
      break;
    case Family::triangular_torus:
      if (arity(1) && p[0] < 3) v.emplace_back("generators.triangular_torus: requires n >= 3");
      break;
    case Family::free_product_ball:
      if (arity(2)) {
        if (p[0] < 3) v.emplace_back("generators.free_product_ball: requires k >= 3");
        if (p[1] < 0) v.emplace_back("generators.free_product_ball: requires R >= 0");
      }
      break;
  }
  return v;
}

nlohmann::json to_metadata(const GeneratorSpec& spec, int declared_degree) {
  return {{"generator", family_name(spec.family)},
          {"parameters", spec.parameters},
          {"seed", spec.seed},
          {"degree", declared_degree}};
}

GeneratorSpec from_metadata(const nlohmann::json& j) {
  GeneratorSpec s;
  s.family = parse_family(j.at("generator").get<std::string>());
  s.parameters = j.at("parameters").get<std::vector<int>>();
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

int declared_degree(const GeneratorSpec& spec) {
  if (auto problems = validate(spec); !problems.empty()) throw std::invalid_argument(problems.front());
  const auto& p = spec.parameters;
  switch (spec.family) {
    case Family::tree_ball:
      return p[0];
    case Family::random_regular:
      return p[1];
    case Family::torus:
      return 2 * static_cast<int>(p.size());
    case Family::slab:
      return slab_interior_degree(p[0], std::vector<int>(p.begin() + 2, p.end()));
    case Family::triangular_torus:
    case Family::free_product_ball:
      return 6;
  }
  return 0;
}

Instance build(const GeneratorSpec& spec) {
  Instance inst;
  inst.spec = spec;
  inst.degree = declared_degree(spec);
  const auto& p = spec.parameters;
  auto from_ball = [&](RootedBall b) {
    auto owned = std::make_shared<const RootedBall>(std::move(b));
    inst.graph = std::shared_ptr<const Graph>(owned, &owned->graph);
    inst.ball = std::move(owned);
  };
  switch (spec.family) {
    case Family::tree_ball:
      from_ball(tree_ball(p[0], p[1]));
      break;
    case Family::random_regular:
      inst.graph = std::make_shared<const Graph>(random_regular(p[0], p[1], spec.seed));
      break;
    case Family::torus:
      inst.graph = std::make_shared<const Graph>(torus(p));
      break;
    case Family::slab:
      inst.graph = std::make_shared<const Graph>(slab(p[0], p[1], std::vector<int>(p.begin() + 2, p.end())));
      break;
    case Family::triangular_torus:
      inst.graph = std::make_shared<const Graph>(triangular_torus(p[0]));
      break;
    case Family::free_product_ball:
      from_ball(free_product_ball(p[0], p[1]));
      break;
  }
  return inst;
}

std::int64_t tree_ball_size(int d, int radius) {
  std::int64_t total = 1, level = d;
  for (int r = 1; r <= radius; ++r) {
    total += level;
    level *= d - 1;
  }
  return total;
}

RootedBall tree_ball(int d, int radius) {
  if (d < 3) throw std::invalid_argument("tree_ball: requires d >= 3");
  if (radius < 0) throw std::invalid_argument("tree_ball: requires R >= 0");
  const std::int64_t n = tree_ball_size(d, radius);
  if (n > 50'000'000) throw std::invalid_argument("tree_ball: ball too large");
  RootedBall b;
  b.radius = radius;
  b.dist.assign(1, 0);
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(static_cast<std::size_t>(n - 1));
  for (std::size_t head = 0; head < b.dist.size(); ++head) {
    if (b.dist[head] == radius) continue;
    const int children = head == 0 ? d : d - 1;
    for (int c = 0; c < children; ++c) {
      edges.emplace_back(static_cast<Vertex>(head), static_cast<Vertex>(b.dist.size()));
      b.dist.push_back(b.dist[head] + 1);
    }
  }
  b.origin.resize(b.dist.size());
  for (std::size_t v = 0; v < b.dist.size(); ++v) {
    b.origin[v] = static_cast<Vertex>(v);
    if (b.dist[v] == radius) b.boundary.push_back(static_cast<Vertex>(v));
  }
  b.graph = Graph::from_edges(static_cast<int>(n), std::move(edges));
  return b;
}

Graph random_regular(int n, int d, std::uint64_t seed, int max_attempts) {
  if (auto problems = validate({Family::random_regular, {n, d}, seed}); !problems.empty())
    throw std::invalid_argument(problems.front());
  const std::size_t halves = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
  std::vector<Vertex> stubs(halves);
  std::vector<std::pair<Vertex, Vertex>> edges(halves / 2);
  std::vector<std::uint64_t> keys(halves / 2);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = 0; i < halves; ++i) stubs[i] = static_cast<Vertex>(i / d);
    Stream rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
    for (std::size_t i = halves - 1; i > 0; --i) std::swap(stubs[i], stubs[rng.below(i + 1)]);
    bool simple = true;
    for (std::size_t e = 0; e < halves / 2 && simple; ++e) {
      Vertex u = stubs[2 * e], v = stubs[2 * e + 1];
      if (u == v) simple = false;
      if (u > v) std::swap(u, v);
      edges[e] = {u, v};
      keys[e] = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    }
    if (!simple) continue;
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) continue;
    return Graph::from_edges(n, edges);
  }
  throw std::runtime_error("random_regular: no simple matching after " +
                           std::to_string(max_attempts) + " attempts");
}

namespace {

// Mixed-radix lattice on `sides`; `wrap[i]` says whether dimension i is a
// cycle. A dimension of size 1 contributes nothing; size 2 contributes one
// edge whether wrapped or not.
Graph product_lattice(const std::vector<int>& sides, const std::vector<bool>& wrap) {
  long long n = 1;
  for (int s : sides) n *= s;
  if (n > std::numeric_limits<Vertex>::max() / 4) throw std::invalid_argument("lattice too large");
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<int> coord(sides.size(), 0);
  for (long long v = 0; v < n; ++v) {
    long long stride = 1;
    for (std::size_t i = 0; i < sides.size(); ++i) {
      const int s = sides[i];
      if (coord[i] + 1 < s)
        edges.emplace_back(static_cast<Vertex>(v), static_cast<Vertex>(v + stride));
      else if (wrap[i] && s >= 3)
        edges.emplace_back(static_cast<Vertex>(v - stride * (s - 1)), static_cast<Vertex>(v));
      stride *= s;
    }
    for (std::size_t i = 0; i < sides.size(); ++i) {
      if (++coord[i] < sides[i]) break;
      coord[i] = 0;
    }
  }
  return Graph::from_edges(static_cast<int>(n), std::move(edges));
}

}  // namespace

Graph torus(const std::vector<int>& sides) {
  if (auto problems = validate({Family::torus, sides, 0}); !problems.empty())
    throw std::invalid_argument(problems.front());
  return product_lattice(sides, std::vector<bool>(sides.size(), true));
}

Graph slab(int k, int L, const std::vector<int>& periodic_sides) {
  std::vector<int> params{k, L};
  params.insert(params.end(), periodic_sides.begin(), periodic_sides.end());
  if (auto problems = validate({Family::slab, params, 0}); !problems.empty())
    throw std::invalid_argument(problems.front());
  std::vector<int> sides(static_cast<std::size_t>(k), L);
  sides.insert(sides.end(), periodic_sides.begin(), periodic_sides.end());
  std::vector<bool> wrap(sides.size(), true);
  std::fill(wrap.begin(), wrap.begin() + k, false);
  return product_lattice(sides, wrap);
}

std::pair<std::vector<Vertex>, std::vector<Vertex>> slab_faces(
    int k, int L, const std::vector<int>& periodic_sides) {
  long long n = 1;
  for (int i = 0; i < k; ++i) n *= L;
  for (int s : periodic_sides) n *= s;
  std::pair<std::vector<Vertex>, std::vector<Vertex>> faces;
  for (long long v = 0; v < n; v += L) {
    faces.first.push_back(static_cast<Vertex>(v));
    faces.second.push_back(static_cast<Vertex>(v + L - 1));
  }
  return faces;
}

Graph triangular_torus(int n) {
  if (n < 3) throw std::invalid_argument("generators.triangular_torus: requires n >= 3");
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(static_cast<std::size_t>(3) * n * n);
  auto id = [n](int i, int j) { return static_cast<Vertex>(((i + n) % n) + n * ((j + n) % n)); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      edges.emplace_back(id(i, j), id(i + 1, j));
      edges.emplace_back(id(i, j), id(i, j + 1));
      edges.emplace_back(id(i, j), id(i + 1, j + 1));
    }
  return Graph::from_edges(n * n, std::move(edges));
}

FreeProductWord& FreeProductWord::times(Factor f, int exponent) {
  if (f == c) exponent = ((exponent % k_) + k_) % k_;
  if (exponent == 0) return *this;
  if (!syllables_.empty() && syllables_.back().factor == f) {
    int e = syllables_.back().exponent + exponent;
    if (f == c) e %= k_;
    if (e == 0)
      syllables_.pop_back();
    else
      syllables_.back().exponent = e;
  } else {
    syllables_.push_back({f, exponent});
  }
  return *this;
}

FreeProductWord FreeProductWord::operator*(const FreeProductWord& rhs) const {
  if (rhs.k_ != k_) throw std::invalid_argument("free product words with different moduli");
  FreeProductWord out = *this;
  for (const auto& s : rhs.syllables_) out.times(s.factor, s.exponent);
  return out;
}

FreeProductWord FreeProductWord::inverse() const {
  FreeProductWord out(k_);
  for (auto it = syllables_.rbegin(); it != syllables_.rend(); ++it) out.times(it->factor, -it->exponent);
  return out;
}

int FreeProductWord::length() const noexcept {
  int len = 0;
  for (const auto& s : syllables_)
    len += s.factor == c ? std::min(s.exponent, k_ - s.exponent) : std::abs(s.exponent);
  return len;
}

std::string FreeProductWord::key() const {
  std::string out;
  out.reserve(syllables_.size() * 3);
  for (const auto& s : syllables_) {
    out.push_back(static_cast<char>(s.factor));
    out.push_back(static_cast<char>(s.exponent & 0xff));
    out.push_back(static_cast<char>((s.exponent >> 8) & 0xff));
  }
  return out;
}

RootedBall free_product_ball(int k, int radius, int vertex_cap) {
  if (k < 3) throw std::invalid_argument("generators.free_product_ball: requires k >= 3");
  if (radius < 0) throw std::invalid_argument("generators.free_product_ball: requires R >= 0");
  using W = FreeProductWord;
  constexpr std::array<std::pair<W::Factor, int>, 6> gens{
      {{W::a, 1}, {W::a, -1}, {W::b, 1}, {W::b, -1}, {W::c, 1}, {W::c, -1}}};
  std::vector<W> words{W(k)};
  std::unordered_map<std::string, Vertex> index{{words[0].key(), 0}};
  RootedBall b;
  b.radius = radius;
  b.dist.push_back(0);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t head = 0; head < words.size(); ++head) {
    for (const auto& [f, e] : gens) {
      W next = words[head];
      next.times(f, e);
      const std::string key = next.key();
      auto it = index.find(key);
      if (it == index.end()) {
        if (b.dist[head] == radius) continue;
        if (static_cast<int>(words.size()) >= vertex_cap)
          throw std::invalid_argument("generators.free_product_ball: ball exceeds vertex cap " +
                                      std::to_string(vertex_cap));
        it = index.emplace(key, static_cast<Vertex>(words.size())).first;
        b.dist.push_back(b.dist[head] + 1);
        words.push_back(std::move(next));
      }
      if (it->second > static_cast<Vertex>(head))
        edges.emplace_back(static_cast<Vertex>(head), it->second);
    }
  }
  const auto n = static_cast<int>(words.size());
  b.origin.resize(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) {
    b.origin[v] = v;
    if (b.dist[v] == radius) b.boundary.push_back(v);
  }
  b.graph = Graph::from_edges(n, std::move(edges));
  return b;
}

}  // namespace perco
