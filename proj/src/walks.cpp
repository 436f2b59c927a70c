#include "perco/walks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "perco/rng.hpp"

namespace perco {

void EscapeQuery::validate() const {
  if (!ball) throw std::invalid_argument("escape query: missing ball");
  if (A.empty()) throw std::invalid_argument("escape query: A is empty");
  if (A.universe() != ball->graph.vertex_count())
    throw std::invalid_argument("escape query: A is over a different vertex set");
  for (Vertex v : A.members())
    if (ball->dist[v] > ball->radius - 1)
      throw std::invalid_argument("escape query: vertex " + std::to_string(v) +
                                  " of A is not interior");
  if (trials < 1) throw std::invalid_argument("escape query: trials must be positive");
}

EscapeExact escape_exact(const EscapeQuery& q, long max_vertices, long max_sweeps) {
  q.validate();
  const RootedBall& b = *q.ball;
  const Graph& g = b.graph;
  if (b.interior_count() > max_vertices)
    throw std::invalid_argument("escape_exact: system too large (" +
                                std::to_string(b.interior_count()) + " interior vertices)");
  const int n = g.vertex_count();
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  std::vector<Vertex> unknowns;
  for (Vertex v = 0; v < n; ++v) {
    if (!b.interior(v))
      f[v] = 1.0;
    else if (!q.A.contains(v))
      unknowns.push_back(v);
  }
  EscapeExact out;
  for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (Vertex x : unknowns) {
      double s = 0.0;
      for (const auto& inc : g.neighbors(x)) s += f[inc.neighbor];
      f[x] = s / g.degree(x);
    }
    double residual = 0.0;
    for (Vertex x : unknowns) {
      double s = 0.0;
      for (const auto& inc : g.neighbors(x)) s += f[inc.neighbor];
      residual = std::max(residual, std::abs(s / g.degree(x) - f[x]));
    }
    out.sweeps = sweep;
    out.residual = residual;
    if (residual <= 1e-12) break;
    if (sweep == max_sweeps) throw std::runtime_error("escape_exact: Gauss-Seidel did not converge");
  }
  double mass = 0.0, escape = 0.0;
  for (Vertex x : q.A.members()) {
    mass += g.degree(x);
    for (const auto& inc : g.neighbors(x)) escape += f[inc.neighbor];
  }
  out.probability = escape / mass;
  return out;
}

namespace {

enum class Outcome : char { escaped, returned, censored };

struct WalkSetup {
  std::vector<double> cumulative;  // degree-weighted start distribution over A
  std::vector<char> absorbing;     // 1: in A, 2: boundary
  long horizon;
};

WalkSetup prepare(const EscapeQuery& q) {
  q.validate();
  const RootedBall& b = *q.ball;
  WalkSetup s;
  s.horizon = q.effective_horizon();
  s.absorbing.assign(static_cast<std::size_t>(b.graph.vertex_count()), 0);
  for (Vertex v : b.boundary) s.absorbing[v] = 2;
  double total = 0.0;
  for (Vertex v : q.A.members()) {
    s.absorbing[v] = 1;
    total += b.graph.degree(v);
    s.cumulative.push_back(total);
  }
  for (double& c : s.cumulative) c /= total;
  return s;
}

Outcome walk_once(const EscapeQuery& q, const WalkSetup& s, long trial) {
  const Graph& g = q.ball->graph;
  Stream rng(derive_seed(q.seed, {static_cast<std::uint64_t>(trial)}));
  const double u = rng.uniform();
  const auto pick = std::upper_bound(s.cumulative.begin(), s.cumulative.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(pick - s.cumulative.begin()),
                                         s.cumulative.size() - 1);
  Vertex x = q.A.members()[idx];
  for (long step = 0; step < s.horizon; ++step) {
    const auto nb = g.neighbors(x);
    x = nb[rng.below(nb.size())].neighbor;
    if (s.absorbing[x] == 1) return Outcome::returned;
    if (s.absorbing[x] == 2) return Outcome::escaped;
  }
  return Outcome::censored;
}

EscapeMc summarize(const std::vector<Outcome>& outcomes) {
  EscapeMc r;
  for (Outcome o : outcomes) {
    r.successes += o == Outcome::escaped;
    r.failures += o == Outcome::returned;
    r.censored += o == Outcome::censored;
  }
  const long decided = r.successes + r.failures;
  if (decided > 0) {
    r.estimate = static_cast<double>(r.successes) / decided;
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / decided);
  }
  return r;
}

}  // namespace

EscapeMc escape_mc(const EscapeQuery& q) {
  const WalkSetup s = prepare(q);
  std::vector<Outcome> outcomes(static_cast<std::size_t>(q.trials));
#pragma omp parallel for schedule(dynamic, 256)
  for (long i = 0; i < q.trials; ++i) outcomes[i] = walk_once(q, s, i);
  return summarize(outcomes);
}

namespace serial {

EscapeMc escape_mc(const EscapeQuery& q) {
  const WalkSetup s = prepare(q);
  std::vector<Outcome> outcomes(static_cast<std::size_t>(q.trials));
  for (long i = 0; i < q.trials; ++i) outcomes[i] = walk_once(q, s, i);
  return summarize(outcomes);
}

}  // namespace serial

LemmaReport lemma_check(const EscapeQuery& q, const SpectralEstimate& lambda1) {
  LemmaReport r;
  r.escape = escape_exact(q).probability;
  r.lambda1 = lambda1.value;
  r.lambda1_lower = lambda1.lower;
  r.radius = q.ball->radius;
  r.set_size = q.A.size();
  r.pass = r.escape >= lambda1.lower - 1e-9;
  return r;
}

}  // namespace perco
