#include "perco/percolation.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "perco/format.hpp"
#include "perco/rng.hpp"
#include "perco/union_find.hpp"

namespace perco {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolation: p must lie in [0, 1]");
}

bool edge_open(std::uint64_t seed, EdgeId e, double p) noexcept {
  return hashed_uniform(seed, static_cast<std::uint64_t>(e)) < p;
}

TrialStats one_trial(const Graph& g, double p, std::uint64_t trial_seed, const CrossingFaces& faces,
                     UnionFind& uf, std::vector<char>& mark) {
  uf.reset();
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edge_open(trial_seed, static_cast<EdgeId>(e), p)) uf.unite(edges[e].first, edges[e].second);
  TrialStats t;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (uf.find(v) != v) continue;
    const int s = uf.size_of(v);
    if (s > t.largest) {
      t.second = t.largest;
      t.largest = s;
    } else if (s > t.second) {
      t.second = s;
    }
  }
  if (!faces.left.empty()) {
    for (Vertex v : faces.left) mark[uf.find(v)] = 1;
    for (Vertex v : faces.right) t.crossing |= mark[uf.find(v)] != 0;
    for (Vertex v : faces.left) mark[uf.find(v)] = 0;
  }
  return t;
}

// Farthest ball distance reached from the root; stops at the boundary.
int reach_once(const RootedBall& b, double p, std::uint64_t trial_seed, std::vector<int>& stamp,
               int stamp_value, std::vector<Vertex>& queue) {
  const Graph& g = b.graph;
  queue.assign(1, b.root);
  stamp[b.root] = stamp_value;
  int farthest = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex x = queue[head];
    for (const auto& inc : g.neighbors(x)) {
      if (stamp[inc.neighbor] == stamp_value || !edge_open(trial_seed, inc.edge, p)) continue;
      stamp[inc.neighbor] = stamp_value;
      farthest = std::max(farthest, b.dist[inc.neighbor]);
      if (farthest == b.radius) return farthest;
      queue.push_back(inc.neighbor);
    }
  }
  return farthest;
}

}  // namespace

int PercolationSample::open_count() const noexcept {
  return static_cast<int>(std::count(open.begin(), open.end(), 1));
}

PercolationSample sample(const Graph& g, double p, std::uint64_t seed) {
  check_probability(p);
  PercolationSample s;
  s.graph = &g;
  s.p = p;
  s.seed = seed;
  s.open.resize(static_cast<std::size_t>(g.edge_count()));
  for (EdgeId e = 0; e < g.edge_count(); ++e) s.open[e] = edge_open(seed, e, p) ? 1 : 0;
  return s;
}

ClusterStats clusters(const Graph& g, const PercolationSample& s, std::optional<Vertex> root) {
  if (static_cast<int>(s.open.size()) != g.edge_count())
    throw std::invalid_argument("clusters: sample does not belong to this graph");
  const int n = g.vertex_count();
  UnionFind uf(n);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (s.open[e]) uf.unite(edges[e].first, edges[e].second);
  ClusterStats c;
  c.component_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> label_of_root(static_cast<std::size_t>(n), -1);
  for (Vertex v = 0; v < n; ++v) {
    const int r = uf.find(v);
    if (label_of_root[r] < 0) {
      label_of_root[r] = v;
      c.sizes.push_back(uf.size_of(r));
    }
    c.component_of[v] = label_of_root[r];
  }
  std::sort(c.sizes.begin(), c.sizes.end(), std::greater<>());
  c.largest = c.sizes.empty() ? 0 : c.sizes[0];
  c.second = c.sizes.size() > 1 ? c.sizes[1] : 0;
  if (root) {
    if (!g.contains(*root)) throw std::invalid_argument("clusters: invalid root");
    c.root_size = uf.size_of(*root);
  }
  return c;
}

std::vector<TrialStats> percolation_trials(const Graph& g, double p, long trials,
                                           std::uint64_t seed, const CrossingFaces& faces) {
  check_probability(p);
  std::vector<TrialStats> out(static_cast<std::size_t>(trials));
#pragma omp parallel
  {
    UnionFind uf(g.vertex_count());
    std::vector<char> mark(faces.left.empty() ? 0 : static_cast<std::size_t>(g.vertex_count()), 0);
#pragma omp for schedule(dynamic, 1)
    for (long i = 0; i < trials; ++i)
      out[i] = one_trial(g, p, derive_seed(seed, {static_cast<std::uint64_t>(i)}), faces, uf, mark);
  }
  return out;
}

std::vector<int> root_reach(const RootedBall& b, double p, long trials, std::uint64_t seed) {
  check_probability(p);
  std::vector<int> out(static_cast<std::size_t>(trials));
#pragma omp parallel
  {
    std::vector<int> stamp(static_cast<std::size_t>(b.graph.vertex_count()), -1);
    std::vector<Vertex> queue;
#pragma omp for schedule(dynamic, 16)
    for (long i = 0; i < trials; ++i)
      out[i] = reach_once(b, p, derive_seed(seed, {static_cast<std::uint64_t>(i)}), stamp,
                          static_cast<int>(i), queue);
  }
  return out;
}

namespace serial {

std::vector<TrialStats> percolation_trials(const Graph& g, double p, long trials,
                                           std::uint64_t seed, const CrossingFaces& faces) {
  check_probability(p);
  std::vector<TrialStats> out;
  UnionFind uf(g.vertex_count());
  std::vector<char> mark(faces.left.empty() ? 0 : static_cast<std::size_t>(g.vertex_count()), 0);
  for (long i = 0; i < trials; ++i)
    out.push_back(one_trial(g, p, derive_seed(seed, {static_cast<std::uint64_t>(i)}), faces, uf, mark));
  return out;
}

std::vector<int> root_reach(const RootedBall& b, double p, long trials, std::uint64_t seed) {
  check_probability(p);
  std::vector<int> out;
  std::vector<int> stamp(static_cast<std::size_t>(b.graph.vertex_count()), -1);
  std::vector<Vertex> queue;
  for (long i = 0; i < trials; ++i)
    out.push_back(reach_once(b, p, derive_seed(seed, {static_cast<std::uint64_t>(i)}), stamp,
                             static_cast<int>(i), queue));
  return out;
}

}  // namespace serial

McEstimate root_survival_prob(const RootedBall& b, double p, long trials, std::uint64_t seed) {
  if (b.radius < 1) throw std::invalid_argument("root_survival_prob: radius must be >= 1");
  const auto reach = root_reach(b, p, trials, seed);
  McEstimate m;
  m.trials = trials;
  const long hits = std::count(reach.begin(), reach.end(), b.radius);
  m.estimate = static_cast<double>(hits) / trials;
  m.std_error = std::sqrt(m.estimate * (1.0 - m.estimate) / trials);
  return m;
}

double tree_survival_exact(int d, double p, int radius) {
  if (d < 3) throw std::invalid_argument("tree_survival_exact: requires d >= 3");
  if (radius < 0) throw std::invalid_argument("tree_survival_exact: requires R >= 0");
  check_probability(p);
  if (radius == 0) return 1.0;
  double s = 1.0;
  for (int j = 0; j < radius - 1; ++j) s = 1.0 - std::pow(1.0 - p * s, d - 1);
  return 1.0 - std::pow(1.0 - p * s, d);
}

SweepResult giant_sweep(const GeneratorSpec& spec, const std::vector<double>& grid, long trials,
                        double alpha, std::uint64_t seed) {
  return giant_sweep(build(spec), grid, trials, alpha, seed);
}

SweepResult giant_sweep(const Instance& inst, const std::vector<double>& grid, long trials,
                        double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("giant_sweep: alpha must lie in (0, 1)");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("giant_sweep: grid must be sorted");
  if (trials < 1) throw std::invalid_argument("giant_sweep: trials must be positive");
  for (double p : grid) check_probability(p);
  SweepResult r;
  r.spec = inst.spec;
  r.alpha = alpha;
  const Graph& g = *inst.graph;
  const double n = g.vertex_count();
  for (double p : grid) {
    const auto stats = percolation_trials(g, p, trials, seed);
    SweepPoint pt;
    pt.p = p;
    pt.trials = trials;
    long giant = 0;
    for (const auto& t : stats) {
      pt.mean_largest_frac += t.largest / n;
      pt.mean_second_frac += t.second / n;
      giant += t.largest >= alpha * n;
    }
    pt.mean_largest_frac /= trials;
    pt.mean_second_frac /= trials;
    pt.prob_giant = static_cast<double>(giant) / trials;
    pt.std_error = std::sqrt(pt.prob_giant * (1.0 - pt.prob_giant) / trials);
    r.points.push_back(pt);
  }
  return r;
}

std::string to_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "p,trials,mean_largest_frac,mean_second_frac,prob_giant,stderr\n";
  for (const auto& pt : r.points)
    out << shortest(pt.p) << ',' << pt.trials << ',' << shortest(pt.mean_largest_frac) << ','
        << shortest(pt.mean_second_frac) << ',' << shortest(pt.prob_giant) << ','
        << shortest(pt.std_error) << '\n';
  return out.str();
}

std::string_view observable_name(Observable o) noexcept {
  switch (o) {
    case Observable::root_survival:
      return "root_survival";
    case Observable::giant_fraction:
      return "giant_fraction";
    case Observable::crossing:
      return "crossing";
  }
  return "unknown";
}

Observable parse_observable(std::string_view name) {
  for (auto o : {Observable::root_survival, Observable::giant_fraction, Observable::crossing})
    if (observable_name(o) == name) return o;
  throw std::invalid_argument("unknown observable '" + std::string(name) + "'");
}

std::string_view survival_rule_name(SurvivalRule r) noexcept {
  return r == SurvivalRule::half_of_max ? "half_of_max" : "radius_doubling";
}

SurvivalRule parse_survival_rule(std::string_view name) {
  for (auto r : {SurvivalRule::half_of_max, SurvivalRule::radius_doubling})
    if (survival_rule_name(r) == name) return r;
  throw std::invalid_argument("unknown survival rule '" + std::string(name) + "'");
}

namespace {

struct Measurement {
  double value = 0.0;
  double std_error = 0.0;
};

// Ratio s_R / s_h and its delta-method standard error from per-trial reach.
Measurement ratio_measurement(long hits_far, long hits_near) {
  if (hits_near == 0) return {0.0, 0.0};
  const double r = static_cast<double>(hits_far) / hits_near;
  return {r, std::sqrt(r * (1.0 - r) / hits_near)};
}

using Evaluator = std::function<Measurement(double)>;

struct Plan {
  Evaluator evaluate;
  double threshold = 0.5;
};

Plan make_plan(const Instance* inst, const GeneratorSpec& spec, const PcOptions& opt) {
  Plan plan;
  switch (opt.observable) {
    case Observable::root_survival: {
      if (spec.family != Family::tree_ball && spec.family != Family::free_product_ball)
        throw std::invalid_argument("estimate_pc: root_survival needs a ball family");
      const int radius = spec.parameters.at(1);
      if (radius < 2) throw std::invalid_argument("estimate_pc: root_survival needs R >= 2");
      const int near = radius / 2;
      if (spec.family == Family::tree_ball && opt.exact_tree) {
        const int d = spec.parameters.at(0);
        if (opt.survival_rule == SurvivalRule::half_of_max) {
          plan.threshold = 0.5 * tree_survival_exact(d, 1.0, radius);
          plan.evaluate = [=](double p) { return Measurement{tree_survival_exact(d, p, radius), 0.0}; };
        } else {
          plan.threshold = static_cast<double>(near) / radius;
          plan.evaluate = [=](double p) {
            const double s_near = tree_survival_exact(d, p, near);
            return Measurement{s_near > 0.0 ? tree_survival_exact(d, p, radius) / s_near : 0.0, 0.0};
          };
        }
        break;
      }
      const auto ball = inst->ball;
      const long trials = opt.trials;
      const auto seed = opt.seed;
      if (opt.survival_rule == SurvivalRule::half_of_max) {
        plan.threshold = 0.5;  // the ball is connected, so P(survival) = 1 at p = 1
        plan.evaluate = [=](double p) {
          const McEstimate m = root_survival_prob(*ball, p, trials, seed);
          return Measurement{m.estimate, m.std_error};
        };
      } else {
        plan.threshold = static_cast<double>(near) / radius;
        plan.evaluate = [=](double p) {
          const auto reach = root_reach(*ball, p, trials, seed);
          const long far_hits = std::count_if(reach.begin(), reach.end(), [&](int r) { return r >= radius; });
          const long near_hits = std::count_if(reach.begin(), reach.end(), [&](int r) { return r >= near; });
          return ratio_measurement(far_hits, near_hits);
        };
      }
      break;
    }
    case Observable::giant_fraction:
    case Observable::crossing: {
      if (!(opt.alpha > 0.0 && opt.alpha < 1.0))
        throw std::invalid_argument("estimate_pc: alpha must lie in (0, 1)");
      CrossingFaces faces;
      if (opt.observable == Observable::crossing) {
        if (spec.family != Family::slab)
          throw std::invalid_argument("estimate_pc: crossing needs the slab family");
        std::vector<int> sides(spec.parameters.begin() + 2, spec.parameters.end());
        auto [left, right] = slab_faces(spec.parameters[0], spec.parameters[1], sides);
        faces = {std::move(left), std::move(right)};
      }
      const auto graph = inst->graph;
      const long trials = opt.trials;
      const auto seed = opt.seed;
      const double cutoff = opt.alpha * graph->vertex_count();
      const bool crossing = opt.observable == Observable::crossing;
      plan.evaluate = [=](double p) {
        const auto stats = percolation_trials(*graph, p, trials, seed, faces);
        long hits = 0;
        for (const auto& t : stats) hits += crossing ? t.crossing : t.largest >= cutoff;
        const double f = static_cast<double>(hits) / trials;
        return Measurement{f, std::sqrt(f * (1.0 - f) / trials)};
      };
      break;
    }
  }
  return plan;
}

PcEstimate bisect(const Plan& plan, const PcOptions& opt) {
  if (!(opt.tol >= 1e-3)) throw std::invalid_argument("estimate_pc: tol must be >= 1e-3");
  PcEstimate est;
  est.observable = opt.observable;
  est.trials_per_point = opt.trials;
  est.alpha = opt.alpha;
  est.threshold = plan.threshold;
  const int halvings = std::max(12, static_cast<int>(std::ceil(std::log2(1.0 / opt.tol))) + 2);

  std::vector<std::pair<double, Measurement>> seen;
  auto measure = [&](double p) {
    const Measurement m = plan.evaluate(p);
    seen.emplace_back(p, m);
    return m;
  };
  double lo = 0.0, hi = 1.0;
  Measurement m_lo = measure(lo), m_hi = measure(hi);
  est.conclusive = m_lo.value < plan.threshold && m_hi.value >= plan.threshold;
  for (int i = 0; i < halvings; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Measurement m = measure(mid);
    if (m.value >= plan.threshold) {
      hi = mid;
      m_hi = m;
    } else {
      lo = mid;
      m_lo = m;
    }
    ++est.iterations;
  }
  // Non-monotone beyond 3 sigma anywhere along the evaluated points.
  std::sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < seen.size(); ++i)
    for (std::size_t j = i + 1; j < seen.size(); ++j) {
      const auto& a = seen[i].second;
      const auto& b = seen[j].second;
      const double spread = 3.0 * std::hypot(a.std_error, b.std_error);
      if (a.value - b.value > spread + 1e-12) est.conclusive = false;
    }
  est.value = 0.5 * (lo + hi);
  est.ci_low = lo;
  est.ci_high = hi;
  est.low_value = m_lo.value;
  est.low_std_error = m_lo.std_error;
  est.high_value = m_hi.value;
  est.high_std_error = m_hi.std_error;
  return est;
}

}  // namespace

PcEstimate estimate_pc(const GeneratorSpec& spec, const PcOptions& opt) {
  if (opt.observable == Observable::root_survival && spec.family == Family::tree_ball &&
      opt.exact_tree) {
    if (auto problems = validate(spec); !problems.empty()) throw std::invalid_argument(problems.front());
    return bisect(make_plan(nullptr, spec, opt), opt);
  }
  const Instance inst = build(spec);
  return estimate_pc(inst, opt);
}

PcEstimate estimate_pc(const Instance& inst, const PcOptions& opt) {
  return bisect(make_plan(&inst, inst.spec, opt), opt);
}

double exhaustive_oracle(const Graph& g, double p, const OracleEvent& event) {
  check_probability(p);
  const int m = g.edge_count();
  if (m > 20) throw std::invalid_argument("exhaustive_oracle: more than 20 edges");
  const int n = g.vertex_count();
  const auto edges = g.edges();
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    UnionFind uf(n);
    int open = 0;
    for (int e = 0; e < m; ++e)
      if (mask >> e & 1u) {
        uf.unite(edges[e].first, edges[e].second);
        ++open;
      }
    bool happens = false;
    if (const auto* rb = std::get_if<RootToBoundary>(&event)) {
      for (Vertex t : rb->targets) happens |= uf.find(t) == uf.find(rb->root);
    } else {
      const int k = std::get<LargestAtLeast>(event).k;
      for (Vertex v = 0; v < n && !happens; ++v) happens = uf.size_of(v) >= k;
    }
    if (happens) total += std::pow(p, open) * std::pow(1.0 - p, m - open);
  }
  return total;
}

}  // namespace perco
