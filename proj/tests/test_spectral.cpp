#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "perco/generators.hpp"
#include "perco/rng.hpp"
#include "perco/spectral.hpp"
#include "support/jacobi.hpp"

using namespace perco;
using testsupport::symmetric_eigenvalues;
using testsupport::walk_matrix;

namespace {

Graph cycle(int n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

Graph complete(int n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

std::vector<Vertex> all_vertices(const Graph& g) {
  std::vector<Vertex> v(static_cast<std::size_t>(g.vertex_count()));
  for (int i = 0; i < g.vertex_count(); ++i) v[i] = i;
  return v;
}

double dense_gap(const Graph& g) {
  const auto ev = symmetric_eigenvalues(walk_matrix(g, all_vertices(g), 1.0 / *g.regular_degree()));
  return 1.0 - ev[ev.size() - 2];
}

double dense_dirichlet(const RootedBall& b, int degree) {
  std::vector<Vertex> interior;
  for (Vertex v = 0; v < b.graph.vertex_count(); ++v)
    if (b.interior(v)) interior.push_back(v);
  const auto ev = symmetric_eigenvalues(walk_matrix(b.graph, interior, 1.0 / degree));
  return 1.0 - ev.back();
}

}  // namespace

TEST_CASE("jacobi oracle on known spectra") {
  for (int n = 3; n <= 12; ++n) {
    const auto ev = symmetric_eigenvalues(walk_matrix(cycle(n), all_vertices(cycle(n)), 0.5));
    for (int j = 0; j < n; ++j) {
      const double expect = std::cos(2.0 * std::numbers::pi * j / n);
      bool found = false;
      for (double x : ev) found |= std::abs(x - expect) < 1e-12;
      CHECK(found);
    }
  }
}

TEST_CASE("dirichlet lambda1 examples") {
  const SpectralEstimate one = lambda1_dirichlet(tree_ball(3, 1));
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));

  // Extrapolation of the tree sequence toward 1 - 2 sqrt(d-1)/d.
  const double limit = 1.0 - 2.0 * std::sqrt(3.0) / 4.0;
  const SpectralEstimate t12 = lambda1_dirichlet(tree_ball(4, 12));
  CHECK(t12.converged);
  CHECK(t12.value >= limit);
  std::vector<double> seq;
  for (int r = 6; r <= 12; ++r) seq.push_back(lambda1_dirichlet(tree_ball(4, r)).value);
  for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] <= seq[i - 1] + 1e-9);
  // Richardson extrapolation assuming value(R) = limit + c / (R + 1)^2.
  const double r1 = 11.0 + 1.0, r2 = 12.0 + 1.0;
  const double extrap = (r2 * r2 * seq[6] - r1 * r1 * seq[5]) / (r2 * r2 - r1 * r1);
  CHECK(std::abs(extrap - limit) < 0.01);
}

TEST_CASE("dirichlet lambda1 matches the dense eigensolve on small balls") {
  for (int d = 3; d <= 5; ++d)
    for (int r = 1; r <= 3; ++r) {
      const RootedBall b = tree_ball(d, r);
      if (b.interior_count() > 30) continue;
      const SpectralEstimate e = lambda1_dirichlet(b, 1e-13);
      CHECK(e.value == doctest::Approx(dense_dirichlet(b, d)).epsilon(1e-8));
      CHECK(e.lower <= e.value);
      CHECK(e.value <= e.upper);
    }
  const RootedBall fp = free_product_ball(3, 2);
  CHECK(lambda1_dirichlet(fp, 1e-13).value == doctest::Approx(dense_dirichlet(fp, 6)).epsilon(1e-8));
}

TEST_CASE("dirichlet lambda1 on a long cycle is small and decreasing") {
  const Graph g = cycle(400);
  double prev = 1.0;
  for (int r : {10, 20, 50}) {
    const SpectralEstimate e = lambda1_dirichlet(ball(g, 0, r));
    CHECK(e.value < prev);
    prev = e.value;
    // Path of 2r - 1 interior vertices: 1 - cos(pi / (2r)).
    CHECK(e.value == doctest::Approx(1.0 - std::cos(std::numbers::pi / (2.0 * r))).epsilon(1e-6));
  }
  CHECK(prev <= 0.002);
  const RootedBall small = ball(g, 0, 5);
  CHECK(lambda1_dirichlet(small, 1e-13).value == doctest::Approx(dense_dirichlet(small, 2)).epsilon(1e-8));
}

TEST_CASE("spectral gap examples") {
  const SpectralEstimate k4 = spectral_gap(complete(4));
  CHECK(k4.value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  for (int n = 3; n <= 20; ++n) {
    const SpectralEstimate c = spectral_gap(cycle(n), 1e-12);
    CHECK(c.value == doctest::Approx(1.0 - std::cos(2.0 * std::numbers::pi / n)).epsilon(1e-8));
    CHECK(c.value == doctest::Approx(dense_gap(cycle(n))).epsilon(1e-8));
    CHECK(c.bipartite_gap.has_value() == (n % 2 == 0));
  }
  CHECK_THROWS_AS(spectral_gap(Graph::from_edges(4, {{0, 1}, {2, 3}})), std::invalid_argument);
}

TEST_CASE("two joined cliques have a small gap") {
  // Two K10 joined by one edge is not regular, so use the matching 9-regular
  // variant: remove one edge inside each clique and cross-link its ends.
  std::vector<std::pair<Vertex, Vertex>> e;
  for (int side = 0; side < 2; ++side)
    for (int i = 0; i < 10; ++i)
      for (int j = i + 1; j < 10; ++j)
        if (!(i == 0 && j == 1)) e.emplace_back(10 * side + i, 10 * side + j);
  e.emplace_back(0, 10);
  e.emplace_back(1, 11);
  const Graph g = Graph::from_edges(20, e);
  const SpectralEstimate gap = spectral_gap(g, 1e-12);
  CHECK(gap.value < 0.05);
  CHECK(gap.value == doctest::Approx(dense_gap(g)).epsilon(1e-8));
}

TEST_CASE("spectral gap matches the dense eigensolve on random regular graphs") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Graph g = random_regular(30, 3 + static_cast<int>(s % 3), s);
    if (g.component_count() != 1) continue;
    CHECK(spectral_gap(g, 1e-12).value == doctest::Approx(dense_gap(g)).epsilon(1e-8));
  }
}

TEST_CASE("cheeger examples") {
  CHECK(cheeger_bracket(complete(4)).value == 2.0);
  CHECK(cheeger_bracket(complete(2)).value == 1.0);
  const Graph two_triangles = Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
  CHECK(cheeger_bracket(two_triangles).value == doctest::Approx(1.0 / 3.0));
  CHECK(cheeger_bracket(complete(4)).method == SpectralMethod::exact_enumeration);
}

TEST_CASE("exact cheeger lies inside the spectral bracket") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const Graph g = random_regular(16, 3, s);
    if (g.component_count() != 1) continue;
    const double h = cheeger_bracket(g).value;
    const SpectralEstimate gap = spectral_gap(g, 1e-12);
    CHECK(3.0 * gap.value / 2.0 <= h + 1e-9);
    CHECK(h <= 3.0 * std::sqrt(2.0 * gap.value) + 1e-9);
  }
  const SpectralEstimate big = cheeger_bracket(torus({6, 6}));
  CHECK(big.method == SpectralMethod::gap_power);
  CHECK(big.lower <= big.upper);
}

TEST_CASE("parallel kernels are bit-identical to the serial ones") {
  const Graph g = random_regular(20000, 3, 4);
  const WalkOperator op(g, 1.0 / 3.0, true);
  std::vector<double> x(op.size()), y(op.size()), z(op.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = hashed_uniform(9, i) - 0.5;
  op.apply(x, y);
  serial::apply(op, x, z);
  CHECK(y == z);
  CHECK(blocked_dot(x, y) == serial::blocked_dot(x, y));
}

TEST_CASE("estimates are deterministic") {
  const Graph g = random_regular(500, 4, 8);
  const SpectralEstimate a = spectral_gap(g, 1e-9), b = spectral_gap(g, 1e-9);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
}
