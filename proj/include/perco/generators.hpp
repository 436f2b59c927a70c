#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "perco/graph.hpp"

namespace perco {

enum class Family { tree_ball, random_regular, torus, slab, triangular_torus, free_product_ball };

std::string_view family_name(Family f) noexcept;
/// Throws std::invalid_argument for an unknown name.
Family parse_family(std::string_view name);

/// Names one graph instance. Parameter layout per family:
///   tree_ball          [d, R]
///   random_regular     [n, d]
///   torus              [side, side, ...]
///   slab               [k, L, periodic side, ...]
///   triangular_torus   [n]
///   free_product_ball  [k, R]
struct GeneratorSpec {
  Family family = Family::torus;
  std::vector<int> parameters;
  std::uint64_t seed = 0;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

/// Lists every violated precondition; empty when the spec is buildable.
std::vector<std::string> validate(const GeneratorSpec& spec);

/// Degree of the (limit) graph, from the parameters alone.
int declared_degree(const GeneratorSpec& spec);

/// JSON metadata sidecar: {generator, parameters, seed, degree}.
nlohmann::json to_metadata(const GeneratorSpec& spec, int declared_degree);
GeneratorSpec from_metadata(const nlohmann::json& j);

/// A generated graph. Ball families also carry their rooted structure; the
/// graph pointer then aliases `ball->graph`.
struct Instance {
  GeneratorSpec spec;
  std::shared_ptr<const Graph> graph;
  std::shared_ptr<const RootedBall> ball;
  /// Degree of the (limit) graph; interior degree for balls and slabs.
  int degree = 0;
};

Instance build(const GeneratorSpec& spec);

/// Radius-R ball of the d-regular tree, vertices in BFS order.
RootedBall tree_ball(int d, int radius);

/// Simple d-regular graph from the configuration model, resampled until
/// simple. Deterministic in the seed. Throws std::runtime_error after
/// `max_attempts` rejected matchings.
Graph random_regular(int n, int d, std::uint64_t seed, int max_attempts = 1000);

/// Cartesian product of cycles. Coordinate 0 varies fastest.
Graph torus(const std::vector<int>& sides);

/// {0..L-1}^k with free boundary times cycles of the given sides. A side of
/// 1 adds nothing and a side of 2 is a single edge. Coordinate 0 varies
/// fastest, so `vertex % L` is the first box coordinate.
Graph slab(int k, int L, const std::vector<int>& periodic_sides);

/// Vertices of the slab with first coordinate 0 and L - 1 respectively.
std::pair<std::vector<Vertex>, std::vector<Vertex>> slab_faces(int k, int L,
                                                               const std::vector<int>& periodic_sides);

/// n x n torus with offsets (1,0), (0,1), (1,1): the triangular lattice.
Graph triangular_torus(int n);

/// Element of Z * Z * Z_k in normal form: alternating syllables from
/// distinct factors, each with nonzero exponent. Exponents of the cyclic
/// factor are kept in [1, k).
class FreeProductWord {
 public:
  enum Factor : std::uint8_t { a = 0, b = 1, c = 2 };
  struct Syllable {
    Factor factor;
    int exponent;
    friend bool operator==(const Syllable&, const Syllable&) = default;
  };

  explicit FreeProductWord(int k) : k_(k) {}

  /// Right-multiplies by factor^exponent and renormalizes.
  FreeProductWord& times(Factor f, int exponent);
  FreeProductWord operator*(const FreeProductWord& rhs) const;
  FreeProductWord inverse() const;

  /// Word length for generators {a, b, c}^{+-1}.
  int length() const noexcept;
  const std::vector<Syllable>& syllables() const noexcept { return syllables_; }
  int modulus() const noexcept { return k_; }
  std::string key() const;

  friend bool operator==(const FreeProductWord& x, const FreeProductWord& y) {
    return x.k_ == y.k_ && x.syllables_ == y.syllables_;
  }

 private:
  int k_;
  std::vector<Syllable> syllables_;
};

/// Radius-R ball around the identity in the Cayley graph of Z * Z * Z_k with
/// generators a^{+-1}, b^{+-1}, c^{+-1}. Throws std::invalid_argument when
/// k < 3 or when the ball would exceed `vertex_cap` vertices.
RootedBall free_product_ball(int k, int radius, int vertex_cap = 5'000'000);

/// Vertex count of the d-regular tree ball of radius R.
std::int64_t tree_ball_size(int d, int radius);

}  // namespace perco
