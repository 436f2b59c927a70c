#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perco/graph.hpp"

namespace perco {

/// ceil(g/2) - 1: the radius inside which every ball of a girth-g graph is
/// a tree. Throws std::invalid_argument for g < 3.
int gtilde(int girth);

/// Two independent labels per edge. X_e(p) uses the same coins as
/// sample(g, p, seed); Y_e(eps) uses the stream derive_seed(seed, {1}).
struct TwoLabelSample {
  const Graph* graph = nullptr;
  std::vector<char> x_open;
  std::vector<char> y_open;
  double p = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;

  bool open(EdgeId e) const noexcept { return x_open[e] || y_open[e]; }
};

TwoLabelSample sample_two_label(const Graph& g, double p, double eps, std::uint64_t seed);

/// (alpha, A)-goodness of the edge (x, u): x in A, u not in A, and at least
/// an alpha fraction of the (d-1)^L non-backtracking length-L paths from u
/// (first step not x) avoid A. Throws std::invalid_argument when x is not in
/// A, (x, u) is not an edge, or the paths leave the regular region.
bool is_good_edge(const Graph& g, const VertexSet& A, Vertex x, Vertex u, double alpha, int L);

struct Census {
  long count = 0;
  double bound = 0.0;  // lambda1 * d * |A| / 2
  long candidates = 0;
};

/// Counts (lambda1/2, A)-good edges among edges leaving A, next to the
/// lower bound lambda1 d |A| / 2 the walk-escape argument guarantees.
/// `alpha` is the goodness fraction; pass lambda1 / 2 for the standard form.
Census good_edge_census(const Graph& g, const VertexSet& A, double alpha, int L, double lambda1,
                        int degree);

struct ExplorationParams {
  double p = 0.0;
  double eps = 0.0;
  double lambda1 = 0.0;
  int gtilde = 1;
  long max_steps = 1000;
  std::uint64_t seed = 0;
};

enum class ExplorationEnd { tau, frontier_empty, max_steps, boundary };
std::string_view end_name(ExplorationEnd e) noexcept;

struct ExplorationTrace {
  std::vector<long> sizes;  // |A_0| .. |A_T|
  std::vector<long> xi;     // |A_{t+1}| - |A_t| for t < T
  std::vector<long> z;      // checked and eps-closed edges touching A_t
  std::optional<long> tau;
  long steps = 0;
  int gtilde = 0;
  int degree = 0;
  bool survived = false;
  bool boundary_hit = false;
  /// The frontier emptied although |A_t| > 2t/(lambda1 d).
  bool frontier_violation = false;
  ExplorationEnd end = ExplorationEnd::max_steps;
  ExplorationParams params;
};

/// Runs the sprinkled exploration from interior vertex v of the ball.
///
/// A_0 is the p-open cluster of v. Each step takes the least-id unchecked
/// (lambda1/2, A)-good edge (x, u), reads its eps-label once, and when it is
/// open adds every vertex w within gtilde of u whose tree path from u avoids
/// A and is p-open. Stops at tau = min{t : |A_t| < 2t/(lambda1 d)}, an empty
/// frontier, max_steps (survival), or when A comes within gtilde + 1 of the
/// ball boundary (boundary_hit; the trace up to that point is returned).
ExplorationTrace run_exploration(const RootedBall& ball, Vertex v, const ExplorationParams& params);

struct Theorem1Inputs {
  int d = 3;
  int g = 3;
  double lambda1 = 0.0;
  double C = 128.0;
  double eps = 0.0;

  /// Lists every violated input constraint.
  std::vector<std::string> violations() const;
};

struct DriftReport {
  long pooled_steps = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double sum_bound = 0.0;     // (eps lambda1 / 2) sum_{j=1}^{g~} (1 + eps(d-1))^j
  double closed_bound = 0.0;  // lambda1 [(1 + eps(d-1))^{g~} - 1] / (2(d-1))
  bool pass_closed = false;   // mean >= closed_bound - 3 stderr
  bool pass_sum = false;
};

double drift_sum_bound(double eps, double lambda1, int d, int gtilde);
double drift_closed_bound(double eps, double lambda1, int d, int gtilde);

/// Pools xi_t over every executed step of every trace. Throws
/// std::invalid_argument on an empty pool or mismatched traces.
DriftReport drift_report(const std::vector<ExplorationTrace>& traces, const Theorem1Inputs& inputs);

struct Theorem1Bound {
  double bound = 0.0;        // min(1, 1/(d-1) + C log(1 + 1/lambda1^2) / (d g))
  double second_term = 0.0;  // unclamped C log(1 + 1/lambda1^2) / (d g)
  double eps_required = 0.0; // ((1 + 8/lambda1^2)^{1/g~} - 1) / (d - 1)
};

Theorem1Bound theorem1_bound(const Theorem1Inputs& inputs);

/// CSV t,size,xi,z; the last row has an empty xi.
std::string trace_csv(const ExplorationTrace& trace);

}  // namespace perco
