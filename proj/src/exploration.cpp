#include "perco/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "perco/rng.hpp"

namespace perco {

int gtilde(int girth) {
  if (girth < 3) throw std::invalid_argument("gtilde: girth must be >= 3");
  return (girth + 1) / 2 - 1;
}

TwoLabelSample sample_two_label(const Graph& g, double p, double eps, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0) || !(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("sample_two_label: p and eps must lie in [0, 1]");
  TwoLabelSample s;
  s.graph = &g;
  s.p = p;
  s.eps = eps;
  s.seed = seed;
  const std::uint64_t y_seed = derive_seed(seed, {1});
  s.x_open.resize(static_cast<std::size_t>(g.edge_count()));
  s.y_open.resize(static_cast<std::size_t>(g.edge_count()));
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    s.x_open[e] = hashed_uniform(seed, static_cast<std::uint64_t>(e)) < p;
    s.y_open[e] = hashed_uniform(y_seed, static_cast<std::uint64_t>(e)) < eps;
  }
  return s;
}

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

PathCount checked_paths(const Graph& g, const VertexSet& A, Vertex x, Vertex u, int L) {
  const PathCount pc = count_nb_paths_avoiding(g, u, x, L, A);
  if (pc.total != ipow(g.degree(u) - 1, L))
    throw std::invalid_argument("good edge: paths from vertex " + std::to_string(u) +
                                " leave the regular region");
  return pc;
}

}  // namespace

bool is_good_edge(const Graph& g, const VertexSet& A, Vertex x, Vertex u, double alpha, int L) {
  if (!A.contains(x)) throw std::invalid_argument("is_good_edge: x is not in A");
  if (!g.adjacent(x, u)) throw std::invalid_argument("is_good_edge: (x, u) is not an edge");
  if (A.contains(u)) return false;
  const PathCount pc = checked_paths(g, A, x, u, L);
  return static_cast<double>(pc.count) >= alpha * static_cast<double>(pc.total);
}

Census good_edge_census(const Graph& g, const VertexSet& A, double alpha, int L, double lambda1,
                        int degree) {
  Census c;
  c.bound = lambda1 * degree * A.size() / 2.0;
  for (Vertex x : A.members())
    for (const auto& inc : g.neighbors(x)) {
      if (A.contains(inc.neighbor)) continue;
      ++c.candidates;
      c.count += is_good_edge(g, A, x, inc.neighbor, alpha, L) ? 1 : 0;
    }
  return c;
}

std::string_view end_name(ExplorationEnd e) noexcept {
  switch (e) {
    case ExplorationEnd::tau:
      return "tau";
    case ExplorationEnd::frontier_empty:
      return "frontier_empty";
    case ExplorationEnd::max_steps:
      return "max_steps";
    case ExplorationEnd::boundary:
      return "boundary";
  }
  return "unknown";
}

namespace {

class Explorer {
 public:
  Explorer(const RootedBall& ball, const ExplorationParams& params)
      : ball_(ball), g_(ball.graph), params_(params),
        labels_(sample_two_label(ball.graph, params.p, params.eps, params.seed)),
        A_(ball.graph.vertex_count()),
        checked_(static_cast<std::size_t>(ball.graph.edge_count()), 0) {}

  ExplorationTrace run(Vertex v) {
    trace_.params = params_;
    trace_.gtilde = params_.gtilde;
    trace_.degree = g_.degree(v);
    const double d = trace_.degree;
    const double alpha = params_.lambda1 / 2.0;

    grow_initial(v);
    trace_.sizes.push_back(A_.size());
    trace_.z.push_back(0);
    if (trace_.boundary_hit) {
      trace_.end = ExplorationEnd::boundary;
      return trace_;
    }
    long closed = 0;
    for (long t = 1; t <= params_.max_steps; ++t) {
      const auto edge = least_good_edge(alpha);
      if (!edge) {
        trace_.end = ExplorationEnd::frontier_empty;
        trace_.frontier_violation = A_.size() > 2.0 * (t - 1) / (params_.lambda1 * d);
        return trace_;
      }
      const auto [e, u] = *edge;
      checked_[e] = 1;
      const long before = A_.size();
      if (labels_.y_open[e])
        annex(u);
      else
        ++closed;
      trace_.steps = t;
      trace_.xi.push_back(A_.size() - before);
      trace_.sizes.push_back(A_.size());
      trace_.z.push_back(closed);
      if (trace_.boundary_hit) {
        trace_.end = ExplorationEnd::boundary;
        return trace_;
      }
      if (static_cast<double>(A_.size()) < 2.0 * t / (params_.lambda1 * d)) {
        trace_.tau = t;
        trace_.end = ExplorationEnd::tau;
        return trace_;
      }
    }
    trace_.survived = true;
    trace_.end = ExplorationEnd::max_steps;
    return trace_;
  }

 private:
  // Goodness of edges at x can only be certified when every length-gtilde
  // path beyond a neighbour of x stays inside the ball.
  bool safe(Vertex x) const { return ball_.dist[x] + 1 + params_.gtilde <= ball_.radius; }

  void add(Vertex w) {
    if (A_.insert(w) && !safe(w)) trace_.boundary_hit = true;
  }

  void grow_initial(Vertex v) {
    add(v);
    for (std::size_t head = 0; head < A_.members().size(); ++head) {
      const Vertex x = A_.members()[head];
      for (const auto& inc : g_.neighbors(x))
        if (labels_.x_open[inc.edge] && !A_.contains(inc.neighbor)) add(inc.neighbor);
    }
  }

  std::optional<std::pair<EdgeId, Vertex>> least_good_edge(double alpha) {
    std::vector<std::pair<EdgeId, Vertex>> candidates;
    for (Vertex x : A_.members())
      for (const auto& inc : g_.neighbors(x))
        if (!checked_[inc.edge] && !A_.contains(inc.neighbor))
          candidates.emplace_back(inc.edge, inc.neighbor);
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [e, u] : candidates) {
      const auto [a, b] = g_.endpoints(e);
      const Vertex x = a == u ? b : a;
      if (is_good_edge(g_, A_, x, u, alpha, params_.gtilde)) return std::pair{e, u};
    }
    return std::nullopt;
  }

  // Adds the vertices within gtilde of u reached by p-open paths that avoid
  // the current A (u itself included). The gtilde-ball around u is a tree,
  // so each such vertex has a unique path from u.
  void annex(Vertex u) {
    std::vector<Vertex> found{u};
    struct Frame {
      Vertex at;
      EdgeId via;
      int depth;
    };
    std::vector<Frame> stack{{u, -1, 0}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      if (f.depth == params_.gtilde) continue;
      for (const auto& inc : g_.neighbors(f.at)) {
        if (inc.edge == f.via || !labels_.x_open[inc.edge] || A_.contains(inc.neighbor)) continue;
        found.push_back(inc.neighbor);
        stack.push_back({inc.neighbor, inc.edge, f.depth + 1});
      }
    }
    for (Vertex w : found) add(w);
  }

  const RootedBall& ball_;
  const Graph& g_;
  ExplorationParams params_;
  TwoLabelSample labels_;
  VertexSet A_;
  std::vector<char> checked_;
  ExplorationTrace trace_;
};

}  // namespace

ExplorationTrace run_exploration(const RootedBall& ball, Vertex v, const ExplorationParams& params) {
  if (!ball.graph.contains(v) || !ball.interior(v))
    throw std::invalid_argument("run_exploration: start vertex must be interior");
  if (!(params.lambda1 > 0.0 && params.lambda1 <= 1.0))
    throw std::invalid_argument("run_exploration: lambda1 must lie in (0, 1]");
  if (params.gtilde < 1) throw std::invalid_argument("run_exploration: gtilde must be >= 1");
  if (params.max_steps < 0) throw std::invalid_argument("run_exploration: negative max_steps");
  return Explorer(ball, params).run(v);
}

std::vector<std::string> Theorem1Inputs::violations() const {
  std::vector<std::string> v;
  if (d < 3) v.emplace_back("exploration.theorem1: requires d >= 3");
  if (g < 3) v.emplace_back("exploration.theorem1: requires g >= 3");
  if (!(lambda1 > 0.0 && lambda1 <= 1.0)) v.emplace_back("exploration.theorem1: lambda1 must lie in (0, 1]");
  if (d >= 3 && !(eps > 0.0 && eps <= 1.0 / (d - 1) + 1e-15))
    v.emplace_back("exploration.theorem1: eps must lie in (0, 1/(d-1)]");
  if (!(C > 0.0)) v.emplace_back("exploration.theorem1: C must be positive");
  return v;
}

double drift_sum_bound(double eps, double lambda1, int d, int gt) {
  double sum = 0.0;
  for (int j = 1; j <= gt; ++j) sum += std::pow(1.0 + eps * (d - 1), j);
  return eps * lambda1 / 2.0 * sum;
}

double drift_closed_bound(double eps, double lambda1, int d, int gt) {
  return lambda1 * (std::pow(1.0 + eps * (d - 1), gt) - 1.0) / (2.0 * (d - 1));
}

DriftReport drift_report(const std::vector<ExplorationTrace>& traces, const Theorem1Inputs& inputs) {
  DriftReport r;
  if (traces.empty()) throw std::invalid_argument("drift_report: no traces");
  const int gt = traces.front().gtilde;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& t : traces) {
    if (t.gtilde != gt || t.params.eps != inputs.eps || t.params.lambda1 != inputs.lambda1)
      throw std::invalid_argument("drift_report: traces do not share (gtilde, eps, lambda1)");
    for (long x : t.xi) {
      sum += static_cast<double>(x);
      sum_sq += static_cast<double>(x) * static_cast<double>(x);
      ++r.pooled_steps;
    }
  }
  if (r.pooled_steps == 0) throw std::invalid_argument("drift_report: empty pool");
  const double n = static_cast<double>(r.pooled_steps);
  r.mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * r.mean * r.mean) / (n - 1)) : 0.0;
  r.std_error = std::sqrt(var / n);
  r.sum_bound = drift_sum_bound(inputs.eps, inputs.lambda1, inputs.d, gt);
  r.closed_bound = drift_closed_bound(inputs.eps, inputs.lambda1, inputs.d, gt);
  r.pass_closed = r.mean >= r.closed_bound - 3.0 * r.std_error;
  r.pass_sum = r.mean >= r.sum_bound - 3.0 * r.std_error;
  return r;
}

Theorem1Bound theorem1_bound(const Theorem1Inputs& in) {
  if (auto v = in.violations(); !v.empty()) throw std::invalid_argument(v.front());
  Theorem1Bound b;
  b.second_term = in.C * std::log(1.0 + 1.0 / (in.lambda1 * in.lambda1)) / (static_cast<double>(in.d) * in.g);
  b.bound = std::min(1.0, 1.0 / (in.d - 1) + b.second_term);
  const int gt = gtilde(in.g);
  b.eps_required = (std::pow(1.0 + 8.0 / (in.lambda1 * in.lambda1), 1.0 / gt) - 1.0) / (in.d - 1);
  return b;
}

std::string trace_csv(const ExplorationTrace& trace) {
  std::ostringstream out;
  out << "t,size,xi,z\n";
  for (std::size_t t = 0; t < trace.sizes.size(); ++t) {
    out << t << ',' << trace.sizes[t] << ',';
    if (t < trace.xi.size()) out << trace.xi[t];
    out << ',' << trace.z[t] << '\n';
  }
  return out.str();
}

}  // namespace perco
