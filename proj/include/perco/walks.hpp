#pragma once

#include <cstdint>
#include <memory>

#include "perco/graph.hpp"
#include "perco/spectral.hpp"

namespace perco {

/// Escape from a set A inside a ball, with the ball's outer sphere standing
/// in for "infinity". The walk starts from pi_A, the degree-weighted
/// restriction of the stationary measure to A.
struct EscapeQuery {
  std::shared_ptr<const RootedBall> ball;
  VertexSet A;
  long horizon = 0;  // step cap per Monte Carlo walk; 0 means 50 * radius
  long trials = 100'000;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument if A is empty, touches the boundary, or
  /// has a vertex farther than radius - 1 from the root.
  void validate() const;
  long effective_horizon() const noexcept { return horizon > 0 ? horizon : 50L * ball->radius; }
};

struct EscapeExact {
  double probability = 0.0;
  long sweeps = 0;
  double residual = 0.0;
};

/// P_{pi_A}(hit the boundary before returning to A), by Gauss-Seidel on the
/// harmonic system over interior vertices outside A, swept in vertex order
/// until the max residual is <= 1e-12.
EscapeExact escape_exact(const EscapeQuery& q, long max_vertices = 100'000,
                         long max_sweeps = 1'000'000);

struct EscapeMc {
  double estimate = 0.0;
  double std_error = 0.0;
  long successes = 0;
  long failures = 0;
  long censored = 0;
};

/// Monte Carlo over q.trials walks. Trial i draws from
/// Stream(derive_seed(q.seed, {i})), so the result is schedule independent.
/// Walks exceeding the horizon are censored and excluded from the estimate.
EscapeMc escape_mc(const EscapeQuery& q);

struct LemmaReport {
  double escape = 0.0;
  double lambda1 = 0.0;
  double lambda1_lower = 0.0;
  int radius = 0;
  int set_size = 0;
  bool pass = false;
};

/// Checks escape >= lambda1 lower bracket - 1e-9 on the same ball.
LemmaReport lemma_check(const EscapeQuery& q, const SpectralEstimate& lambda1);

namespace serial {

EscapeMc escape_mc(const EscapeQuery& q);

}  // namespace serial

}  // namespace perco
