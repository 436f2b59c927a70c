#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "perco/generators.hpp"
#include "perco/graph.hpp"

namespace perco {

/// One Bernoulli bond configuration. Edge e is open iff
/// hashed_uniform(seed, e) < p, which couples all p monotonically.
struct PercolationSample {
  const Graph* graph = nullptr;
  std::vector<char> open;
  double p = 0.0;
  std::uint64_t seed = 0;

  int open_count() const noexcept;
};

/// Throws std::invalid_argument when p is outside [0, 1].
PercolationSample sample(const Graph& g, double p, std::uint64_t seed);

struct ClusterStats {
  std::vector<int> component_of;  // labels are smallest vertex id of each component
  std::vector<int> sizes;         // non-increasing
  int largest = 0;
  int second = 0;
  std::optional<int> root_size;
};

ClusterStats clusters(const Graph& g, const PercolationSample& s,
                      std::optional<Vertex> root = std::nullopt);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

/// P_p(root connected to the boundary sphere) inside the ball.
McEstimate root_survival_prob(const RootedBall& b, double p, long trials, std::uint64_t seed);

/// Per-trial farthest distance from the root reached by the open cluster of
/// the root. Trial i uses edge coins derive_seed(seed, {i}).
std::vector<int> root_reach(const RootedBall& b, double p, long trials, std::uint64_t seed);

/// Exact P_p(root connected to level R) on the d-regular tree:
/// s_0 = 1, s_{j+1} = 1 - (1 - p s_j)^{d-1}, root 1 - (1 - p s_{R-1})^d.
double tree_survival_exact(int d, double p, int radius);

struct TrialStats {
  int largest = 0;
  int second = 0;
  bool crossing = false;
};

/// Faces used by the crossing observable; empty faces disable it.
struct CrossingFaces {
  std::vector<Vertex> left;
  std::vector<Vertex> right;
};

/// Runs `trials` independent configurations at p; trial i uses
/// derive_seed(seed, {i}) for its edge coins. Parallel over trials.
std::vector<TrialStats> percolation_trials(const Graph& g, double p, long trials,
                                           std::uint64_t seed, const CrossingFaces& faces = {});

struct SweepPoint {
  double p = 0.0;
  long trials = 0;
  double mean_largest_frac = 0.0;
  double mean_second_frac = 0.0;
  double prob_giant = 0.0;
  double std_error = 0.0;
};

struct SweepResult {
  GeneratorSpec spec;
  double alpha = 0.0;
  std::vector<SweepPoint> points;
};

/// Giant-component sweep: per p, mean largest and second-largest cluster
/// fractions and the empirical P(largest >= alpha n). Trial seeds are shared
/// across grid points, so the curves are monotone per seed.
SweepResult giant_sweep(const GeneratorSpec& spec, const std::vector<double>& grid, long trials,
                        double alpha, std::uint64_t seed);
SweepResult giant_sweep(const Instance& inst, const std::vector<double>& grid, long trials,
                        double alpha, std::uint64_t seed);

/// CSV with header p,trials,mean_largest_frac,mean_second_frac,prob_giant,stderr.
std::string to_csv(const SweepResult& r);

enum class Observable { root_survival, giant_fraction, crossing };
std::string_view observable_name(Observable o) noexcept;
Observable parse_observable(std::string_view name);

/// How a root-survival curve is turned into a threshold.
///   half_of_max:     P(root <-> boundary) crosses half of its p = 1 value.
///   radius_doubling: s_R / s_{R/2} crosses (R/2)/R, the ratio a critical
///                    branching survival curve ~ c/r would give.
enum class SurvivalRule { half_of_max, radius_doubling };
std::string_view survival_rule_name(SurvivalRule r) noexcept;
SurvivalRule parse_survival_rule(std::string_view name);

struct PcOptions {
  Observable observable = Observable::giant_fraction;
  SurvivalRule survival_rule = SurvivalRule::half_of_max;
  double alpha = 0.01;
  double tol = 1e-3;
  long trials = 40;
  std::uint64_t seed = 0;
  /// For tree_ball specs with root_survival, use tree_survival_exact instead
  /// of Monte Carlo (the ball is never built).
  bool exact_tree = true;
};

struct PcEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Observable observable = Observable::giant_fraction;
  long trials_per_point = 0;
  double alpha = 0.0;
  double threshold = 0.0;
  int iterations = 0;
  bool conclusive = true;
  /// Observable and its standard error at the final bracket ends.
  double low_value = 0.0, low_std_error = 0.0;
  double high_value = 0.0, high_std_error = 0.0;
};

/// Bisection on p over [0, 1] for the monotone observable, with
/// max(12, ceil(log2(1/tol)) + 2) halvings. The CI is the final bracket.
/// Throws std::invalid_argument when tol < 1e-3 or the observable does not
/// apply to the family.
PcEstimate estimate_pc(const GeneratorSpec& spec, const PcOptions& opt);
PcEstimate estimate_pc(const Instance& inst, const PcOptions& opt);

struct RootToBoundary {
  Vertex root;
  std::vector<Vertex> targets;
};
struct LargestAtLeast {
  int k;
};
using OracleEvent = std::variant<RootToBoundary, LargestAtLeast>;

/// Exact event probability by summing over all 2^m configurations.
/// Throws std::invalid_argument for more than 20 edges.
double exhaustive_oracle(const Graph& g, double p, const OracleEvent& event);

namespace serial {

std::vector<TrialStats> percolation_trials(const Graph& g, double p, long trials,
                                           std::uint64_t seed, const CrossingFaces& faces = {});
std::vector<int> root_reach(const RootedBall& b, double p, long trials, std::uint64_t seed);

}  // namespace serial

}  // namespace perco
