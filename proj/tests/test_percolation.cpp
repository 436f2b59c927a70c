#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "perco/generators.hpp"
#include "perco/percolation.hpp"

using namespace perco;

namespace {

Graph cycle(int n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

// Components by iterative DFS, as a second implementation.
std::vector<int> dfs_components(const Graph& g, const PercolationSample& s) {
  std::vector<int> label(static_cast<std::size_t>(g.vertex_count()), -1);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (label[v] >= 0) continue;
    std::vector<Vertex> stack{v};
    label[v] = v;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (const auto& inc : g.neighbors(x))
        if (s.open[inc.edge] && label[inc.neighbor] < 0) {
          label[inc.neighbor] = v;
          stack.push_back(inc.neighbor);
        }
    }
  }
  return label;
}

PercolationSample with_open(const Graph& g, std::vector<EdgeId> open) {
  PercolationSample s = sample(g, 0.0, 0);
  for (EdgeId e : open) s.open[e] = 1;
  return s;
}

// Three-sigma band around an exact probability.
double band(double exact, long n) { return 3.0 * std::sqrt(exact * (1.0 - exact) / n) + 1.0 / n; }

}  // namespace

TEST_CASE("sample examples") {
  const Graph g = torus({10, 10});
  CHECK(sample(g, 0.0, 3).open_count() == 0);
  CHECK(sample(g, 1.0, 3).open_count() == g.edge_count());
  CHECK_THROWS_AS(sample(g, 1.5, 3), std::invalid_argument);
  CHECK_THROWS_AS(sample(g, -0.1, 3), std::invalid_argument);
  const PercolationSample a = sample(g, 0.4, 11), b = sample(g, 0.4, 11);
  CHECK(a.open == b.open);
}

TEST_CASE("open count is binomial") {
  const Graph g = torus({1000, 500});  // 10^6 edges
  REQUIRE(g.edge_count() == 1'000'000);
  const int open = sample(g, 0.5, 2).open_count();
  CHECK(std::abs(open - 500'000) <= 4.0 * std::sqrt(0.25e6));
}

TEST_CASE("cluster examples") {
  const Graph c4 = cycle(4);
  const ClusterStats all = clusters(c4, sample(c4, 1.0, 0));
  CHECK(all.sizes == std::vector<int>{4});
  const ClusterStats none = clusters(c4, sample(c4, 0.0, 0));
  CHECK(none.sizes == std::vector<int>(4, 1));
  CHECK(none.second == 1);
  // Edge ids follow input order: (0,1), (1,2), (2,3), (0,3).
  const ClusterStats two = clusters(c4, with_open(c4, {0, 2}), 3);
  CHECK(two.sizes == std::vector<int>{2, 2});
  CHECK(two.largest == 2);
  CHECK(two.second == 2);
  CHECK(two.root_size == 2);
  CHECK(two.component_of[3] == 2);
}

TEST_CASE("clusters agree with a depth-first labelling") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Graph g = seed % 2 ? torus({9, 11}) : random_regular(300, 3, seed);
    const PercolationSample s = sample(g, 0.2 + 0.015 * static_cast<double>(seed), seed);
    const ClusterStats c = clusters(g, s);
    CHECK(c.component_of == dfs_components(g, s));
    long total = 0;
    for (int x : c.sizes) total += x;
    CHECK(total == g.vertex_count());
    CHECK(std::is_sorted(c.sizes.rbegin(), c.sizes.rend()));
    CHECK(c.largest >= c.second);
  }
}

TEST_CASE("monotone coupling across p") {
  const Graph g = random_regular(2000, 3, 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    int prev_largest = 0;
    std::vector<char> prev(static_cast<std::size_t>(g.edge_count()), 0);
    for (double p = 0.0; p <= 1.0; p += 0.05) {
      const PercolationSample s = sample(g, p, seed);
      for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (prev[e]) CHECK(s.open[e]);
      const int largest = clusters(g, s).largest;
      CHECK(largest >= prev_largest);
      prev_largest = largest;
      prev = s.open;
    }
  }
}

TEST_CASE("exact tree survival") {
  CHECK(tree_survival_exact(3, 0.5, 1) == doctest::Approx(0.875));
  for (int r = 0; r <= 20; ++r) CHECK(tree_survival_exact(4, 1.0, r) == 1.0);
  CHECK(tree_survival_exact(3, 0.45, 200) < 1e-3);
  CHECK(tree_survival_exact(3, 0.55, 200) > 0.1);
  for (int d = 3; d <= 6; ++d)
    for (double p = 0.0; p <= 1.0; p += 0.05)
      for (int r = 1; r <= 40; ++r) {
        CHECK(tree_survival_exact(d, p, r) <= tree_survival_exact(d, p, r - 1) + 1e-15);
        CHECK(tree_survival_exact(d, p, r) <= tree_survival_exact(d, std::min(1.0, p + 0.05), r) + 1e-15);
      }
}

TEST_CASE("root survival monte carlo matches the tree recursion") {
  const RootedBall b = tree_ball(3, 10);
  const long n = 40'000;
  for (double p : {0.3, 0.5, 0.7}) {
    const double exact = tree_survival_exact(3, p, 10);
    const McEstimate m = root_survival_prob(b, p, n, 17);
    CHECK(std::abs(m.estimate - exact) <= band(exact, n));
  }
  CHECK(root_survival_prob(b, 1.0, 100, 1).estimate == 1.0);
  CHECK(root_survival_prob(b, 0.0, 100, 1).estimate == 0.0);
}

TEST_CASE("exhaustive oracle examples") {
  const Graph edge = Graph::from_edges(2, {{0, 1}});
  const Graph path = Graph::from_edges(3, {{0, 1}, {1, 2}});
  for (double p : {0.0, 0.2, 0.5, 0.9}) {
    CHECK(exhaustive_oracle(edge, p, RootToBoundary{0, {1}}) == doctest::Approx(p));
    CHECK(exhaustive_oracle(path, p, RootToBoundary{0, {2}}) == doctest::Approx(p * p));
  }
  // C4 at p = 1/2: of 16 configurations, the 5 with >= 3 open edges plus the
  // 4 paths of two adjacent edges give a component of size >= 3.
  const Graph c4 = cycle(4);
  const double exact = exhaustive_oracle(c4, 0.5, LargestAtLeast{3});
  CHECK(exact == doctest::Approx(9.0 / 16.0));
  const long n = 1'000'000;
  long hits = 0;
  for (const TrialStats& t : percolation_trials(c4, 0.5, n, 8)) hits += t.largest >= 3;
  CHECK(std::abs(static_cast<double>(hits) / n - exact) <= band(exact, n));
  CHECK_THROWS_AS(exhaustive_oracle(torus({4, 4}), 0.5, LargestAtLeast{2}), std::invalid_argument);
}

TEST_CASE("monte carlo observables agree with the oracle on small fixtures") {
  std::vector<RootedBall> fixtures = {tree_ball(3, 2), ball(torus({7, 7}), 0, 2), ball(cycle(12), 0, 4),
                                      ball(triangular_torus(5), 0, 1)};
  const long n = 100'000;
  for (const RootedBall& b : fixtures) {
    REQUIRE(b.graph.edge_count() <= 20);
    for (double p : {0.3, 0.6}) {
      const double exact = exhaustive_oracle(b.graph, p, RootToBoundary{b.root, b.boundary});
      CHECK(std::abs(root_survival_prob(b, p, n, 3).estimate - exact) <= band(exact, n));
      const int k = (b.graph.vertex_count() + 1) / 2;
      const double giant = exhaustive_oracle(b.graph, p, LargestAtLeast{k});
      long hits = 0;
      for (const TrialStats& t : percolation_trials(b.graph, p, n, 4)) hits += t.largest >= k;
      CHECK(std::abs(static_cast<double>(hits) / n - giant) <= band(giant, n));
    }
  }
}

TEST_CASE("giant sweep on a random cubic graph") {
  const GeneratorSpec spec{Family::random_regular, {10'000, 3}, 21};
  const SweepResult r = giant_sweep(spec, {0.3, 0.7, 1.0}, 40, 0.01, 9);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[0].prob_giant <= 0.05);
  CHECK(r.points[1].prob_giant >= 0.95);
  CHECK(r.points[0].mean_largest_frac < r.points[1].mean_largest_frac);
  const Instance inst = build(spec);
  if (inst.graph->component_count() == 1) CHECK(r.points[2].mean_largest_frac == 1.0);
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("p,trials,mean_largest_frac,mean_second_frac,prob_giant,stderr\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK_THROWS_AS(giant_sweep(spec, {0.5, 0.4}, 4, 0.01, 1), std::invalid_argument);
  CHECK_THROWS_AS(giant_sweep(spec, {0.5}, 4, 1.5, 1), std::invalid_argument);
}

TEST_CASE("threshold estimate on the tree is the branching value") {
  PcOptions opt;
  opt.observable = Observable::root_survival;
  opt.survival_rule = SurvivalRule::radius_doubling;
  const PcEstimate e = estimate_pc(GeneratorSpec{Family::tree_ball, {3, 200}, 0}, opt);
  CHECK(std::abs(e.value - 0.5) <= 2e-3);
  CHECK(e.ci_low <= e.value);
  CHECK(e.value <= e.ci_high);
  CHECK(e.ci_high - e.ci_low <= 2e-3);
  opt.tol = 1e-4;
  CHECK_THROWS_AS(estimate_pc(GeneratorSpec{Family::tree_ball, {3, 200}, 0}, opt), std::invalid_argument);
  opt.tol = 1e-3;
  opt.observable = Observable::crossing;
  CHECK_THROWS_AS(estimate_pc(GeneratorSpec{Family::torus, {8, 8}, 0}, opt), std::invalid_argument);
}

TEST_CASE("parallel trials are identical to the serial reference") {
  const Graph g = slab(2, 40, {});
  const auto faces = slab_faces(2, 40, {});
  const auto par = percolation_trials(g, 0.5, 300, 6, {faces.first, faces.second});
  const auto ser = serial::percolation_trials(g, 0.5, 300, 6, {faces.first, faces.second});
  REQUIRE(par.size() == ser.size());
  bool same = true;
  for (std::size_t i = 0; i < par.size(); ++i)
    same = same && par[i].largest == ser[i].largest && par[i].second == ser[i].second &&
           par[i].crossing == ser[i].crossing;
  CHECK(same);
  const RootedBall b = free_product_ball(5, 6);
  CHECK(root_reach(b, 0.3, 500, 2) == serial::root_reach(b, 0.3, 500, 2));
}
