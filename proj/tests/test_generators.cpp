#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <nlohmann/json.hpp>

#include "perco/generators.hpp"
#include "perco/rng.hpp"

using namespace perco;

TEST_CASE("tree balls") {
  const RootedBall t1 = tree_ball(3, 1);
  CHECK(t1.graph.vertex_count() == 4);
  CHECK(t1.graph.edge_count() == 3);
  CHECK(tree_ball(3, 2).graph.vertex_count() == 10);
  CHECK(tree_ball(4, 3).graph.vertex_count() == 53);
  for (int d = 3; d <= 6; ++d)
    for (int r = 0; r <= 5; ++r) {
      const RootedBall b = tree_ball(d, r);
      b.check_invariants();
      std::int64_t closed = 1;
      std::int64_t pw = 1;
      for (int i = 0; i < r; ++i) pw *= d - 1;
      closed += d * (pw - 1) / (d - 2);
      CHECK(b.graph.vertex_count() == closed);
      CHECK(girth(b.graph).acyclic());
      for (Vertex v = 0; v < b.graph.vertex_count(); ++v)
        if (b.interior(v)) CHECK(b.graph.degree(v) == d);
    }
  CHECK_THROWS_AS(tree_ball(2, 3), std::invalid_argument);
}

TEST_CASE("random regular graphs") {
  const Graph g = random_regular(10, 3, 42);
  CHECK(g.regular_degree() == 3);
  CHECK(g.edge_count() == 15);

  const Graph k4 = random_regular(4, 3, 9);
  CHECK(k4.edge_count() == 6);
  for (Vertex u = 0; u < 4; ++u)
    for (Vertex v = u + 1; v < 4; ++v) CHECK(k4.adjacent(u, v));

  const Graph a = random_regular(2000, 5, 77), b = random_regular(2000, 5, 77);
  REQUIRE(a.edge_count() == b.edge_count());
  bool same = true;
  for (EdgeId e = 0; e < a.edge_count(); ++e) same = same && a.endpoints(e) == b.endpoints(e);
  CHECK(same);
  CHECK(random_regular(2000, 5, 78).endpoints(0) != a.endpoints(0));

  CHECK_THROWS_AS(random_regular(5, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_regular(10, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_regular(3, 3, 1), std::invalid_argument);
}

TEST_CASE("random regular output is pinned for a fixed seed") {
  // Guards the seed discipline: the stream must not depend on the platform.
  const Graph g = random_regular(8, 3, 2024);
  std::uint64_t h = 0;
  for (const auto& [u, v] : g.edges()) h = mix64(h ^ (static_cast<std::uint64_t>(u) << 32 | static_cast<std::uint32_t>(v)));
  CHECK(h == 0x321935a705049b7aULL);
}

TEST_CASE("configuration model attempt cap") {
  // d = 6 is rejected with probability close to 1 - exp(-35/4), so a tight
  // cap fails quickly; the message names the cap.
  CHECK_THROWS_WITH_AS(random_regular(200, 6, 3, 1), doctest::Contains("1 attempts"), std::runtime_error);
}

TEST_CASE("tori") {
  const Graph c5 = torus({5});
  CHECK(c5.vertex_count() == 5);
  CHECK(c5.edge_count() == 5);
  CHECK(girth(c5).length == 5);
  const Graph t44 = torus({4, 4});
  CHECK(t44.vertex_count() == 16);
  CHECK(t44.edge_count() == 32);
  CHECK(t44.regular_degree() == 4);
  const Graph t333 = torus({3, 3, 3});
  CHECK(t333.vertex_count() == 27);
  CHECK(t333.regular_degree() == 6);
  for (int n = 5; n <= 8; ++n) CHECK(girth(torus({n, n})).length == 4);
  CHECK_THROWS_AS(torus({2, 5}), std::invalid_argument);
  CHECK_THROWS_AS(torus({}), std::invalid_argument);
}

TEST_CASE("slabs") {
  const Graph grid = slab(2, 3, {});
  CHECK(grid.vertex_count() == 9);
  CHECK(grid.edge_count() == 12);
  const Graph cyl = slab(1, 4, {3});
  CHECK(cyl.vertex_count() == 12);
  CHECK(cyl.edge_count() == 3 * 3 + 4 * 3);
  const Graph s = slab(2, 64, {8});
  CHECK(s.vertex_count() == 64 * 64 * 8);
  CHECK(s.max_degree() == 6);
  CHECK(build({Family::slab, {2, 64, 8}, 0}).degree == 6);
  CHECK(slab(2, 5, {1}).edge_count() == slab(2, 5, {}).edge_count());
  CHECK(slab(2, 5, {2}).edge_count() == 2 * slab(2, 5, {}).edge_count() + 25);

  const auto [left, right] = slab_faces(2, 5, {3});
  CHECK(left.size() == 15);
  for (Vertex v : left) CHECK(v % 5 == 0);
  for (Vertex v : right) CHECK(v % 5 == 4);
  CHECK_THROWS_AS(slab(0, 3, {}), std::invalid_argument);
  CHECK_THROWS_AS(slab(2, 1, {}), std::invalid_argument);
}

TEST_CASE("triangular tori") {
  const Graph t3 = triangular_torus(3);
  CHECK(t3.vertex_count() == 9);
  CHECK(t3.edge_count() == 27);
  CHECK(t3.regular_degree() == 6);
  CHECK(girth(triangular_torus(5)).length == 3);
  CHECK(triangular_torus(4).edge_count() == 48);
  CHECK_THROWS_AS(triangular_torus(2), std::invalid_argument);
}

TEST_CASE("free product words") {
  using W = FreeProductWord;
  W x(5);
  x.times(W::a, 1).times(W::a, -1);
  CHECK(x.syllables().empty());
  W c5(5);
  for (int i = 0; i < 5; ++i) c5.times(W::c, 1);
  CHECK(c5.syllables().empty());
  W y(5);
  y.times(W::c, -1);
  CHECK(y.syllables() == std::vector<W::Syllable>{{W::c, 4}});
  CHECK(y.length() == 1);

  // Associativity and inverses on pseudo-random words.
  auto random_word = [](std::uint64_t seed) {
    Stream s(seed);
    W w(7);
    const int len = 1 + static_cast<int>(s.below(8));
    for (int i = 0; i < len; ++i)
      w.times(static_cast<W::Factor>(s.below(3)), static_cast<int>(s.below(5)) - 2);
    return w;
  };
  for (std::uint64_t t = 0; t < 200; ++t) {
    const W a = random_word(3 * t), b = random_word(3 * t + 1), c = random_word(3 * t + 2);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a * a.inverse()).syllables().empty());
  }
}

TEST_CASE("free product balls") {
  CHECK(free_product_ball(5, 1).graph.vertex_count() == 7);
  CHECK(girth(free_product_ball(5, 3).graph).length == 5);
  CHECK(girth(free_product_ball(100, 2).graph).acyclic());
  for (int k : {3, 4, 5, 7}) {
    const RootedBall b = free_product_ball(k, 4);
    b.check_invariants();
    for (Vertex v = 0; v < b.graph.vertex_count(); ++v)
      if (b.interior(v)) CHECK(b.graph.degree(v) == 6);
  }
  // Sphere growth ratio never exceeds 5 beyond the first step.
  const RootedBall b = free_product_ball(9, 6);
  std::vector<long> sphere(7, 0);
  for (int d : b.dist) ++sphere[d];
  CHECK(sphere[1] == 6);
  for (int r = 2; r <= 6; ++r) CHECK(sphere[r] <= 5 * sphere[r - 1]);
  for (int r = 2; r <= 4; ++r) CHECK(sphere[r] == 5 * sphere[r - 1]);  // below girth/2 the ball is a tree
  CHECK_THROWS_AS(free_product_ball(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(free_product_ball(9, 12, 1000), std::invalid_argument);
}

TEST_CASE("spec validation and metadata round trip") {
  CHECK(validate({Family::torus, {2, 5}, 0}) == std::vector<std::string>{"generators.torus: side 2 < 3"});
  CHECK(validate({Family::random_regular, {5, 3}, 0}).size() == 1);
  CHECK(validate({Family::tree_ball, {3}, 0}).size() == 1);
  CHECK(validate({Family::free_product_ball, {9, 7}, 0}).empty());
  const GeneratorSpec spec{Family::random_regular, {100, 3}, 12345};
  const auto j = to_metadata(spec, 3);
  CHECK(j["generator"] == "random_regular");
  CHECK(j["degree"] == 3);
  CHECK(from_metadata(j) == spec);
  CHECK(parse_family("slab") == Family::slab);
  CHECK_THROWS_AS(parse_family("petersen"), std::invalid_argument);
}

TEST_CASE("declared degree matches measured degrees") {
  for (const GeneratorSpec& spec :
       {GeneratorSpec{Family::tree_ball, {4, 4}, 0}, GeneratorSpec{Family::random_regular, {100, 4}, 1},
        GeneratorSpec{Family::torus, {5, 6}, 0}, GeneratorSpec{Family::slab, {2, 6, 4}, 0},
        GeneratorSpec{Family::triangular_torus, {6}, 0}, GeneratorSpec{Family::free_product_ball, {5, 3}, 0}}) {
    const Instance inst = build(spec);
    CHECK(inst.graph->max_degree() == inst.degree);
    if (inst.ball)
      for (Vertex v = 0; v < inst.graph->vertex_count(); ++v)
        if (inst.ball->interior(v)) CHECK(inst.graph->degree(v) == inst.degree);
  }
}

TEST_CASE("declared degree needs no graph") {
  CHECK(declared_degree({Family::tree_ball, {3, 500}, 0}) == 3);
  CHECK(declared_degree({Family::slab, {2, 64, 8}, 0}) == build({Family::slab, {2, 16, 8}, 0}).degree);
  CHECK(declared_degree({Family::free_product_ball, {7, 30}, 0}) == 6);
  CHECK_THROWS_AS(declared_degree({Family::torus, {2, 5}, 0}), std::invalid_argument);
}
