#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "perco/graph.hpp"

namespace perco {

enum class SpectralMethod { dirichlet_power, gap_power, exact_enumeration };

std::string_view method_name(SpectralMethod m) noexcept;

struct SpectralEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  long iterations = 0;
  double residual = 0.0;
  SpectralMethod method = SpectralMethod::gap_power;
  bool converged = true;
  /// 1 - |lambda_min(P)|, filled by spectral_gap for bipartite graphs.
  std::optional<double> bipartite_gap;
};

inline constexpr long kPowerIterationCap = 1'000'000;

/// Bottom of the spectrum of I - P with Dirichlet (absorbing) boundary on
/// the ball's outer sphere: 1 - rho(P restricted to interior vertices),
/// where P is the simple random walk of the d-regular host graph.
///
/// Power iteration runs on the lazy operator (I + P_int)/2 from the all-ones
/// vector. The bracket is the Collatz-Wielandt interval of the final
/// iterate, so `lower` is a certified lower bound on the Dirichlet value.
/// Non-convergence is reported through `converged`, not thrown.
SpectralEstimate lambda1_dirichlet(const RootedBall& ball, double tol = 1e-10,
                                   long max_iterations = kPowerIterationCap);

/// 1 - lambda_2(P) for a connected regular graph, lambda_2 the second
/// largest (signed) eigenvalue. Not clamped: K_n gives 1 + 1/(n-1).
/// Throws std::invalid_argument for disconnected or irregular input.
SpectralEstimate spectral_gap(const Graph& g, double tol = 1e-10,
                              long max_iterations = kPowerIterationCap);

/// Cheeger constant h(G). Exact subset enumeration up to 20 vertices;
/// beyond that the spectral bracket [d*gap/2, d*sqrt(2*gap)] (regular only).
SpectralEstimate cheeger_bracket(const Graph& g);

/// Row-compressed simple-random-walk block restricted to `active` rows and
/// columns, optionally lazy: y = (x + P x)/2.
class WalkOperator {
 public:
  /// All vertices active.
  WalkOperator(const Graph& g, double inverse_degree, bool lazy);
  /// Only vertices with keep[v] active; columns outside are dropped
  /// (absorbing). Index i of the operator maps to active_vertices()[i].
  WalkOperator(const Graph& g, std::span<const char> keep, double inverse_degree, bool lazy);

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  std::span<const Vertex> active_vertices() const noexcept { return vertices_; }

  /// y = M x, rows in parallel. Bit-identical to serial::apply.
  void apply(std::span<const double> x, std::span<double> y) const;

  const std::vector<int>& offsets() const noexcept { return offsets_; }
  const std::vector<int>& columns() const noexcept { return columns_; }
  double inverse_degree() const noexcept { return inverse_degree_; }
  bool lazy() const noexcept { return lazy_; }

 private:
  std::vector<int> offsets_{0};
  std::vector<int> columns_;
  std::vector<Vertex> vertices_;
  double inverse_degree_;
  bool lazy_;
};

/// Dot product summed in fixed 4096-element blocks, blocks reduced in index
/// order. The result does not depend on the thread count.
double blocked_dot(std::span<const double> x, std::span<const double> y);

namespace serial {

void apply(const WalkOperator& op, std::span<const double> x, std::span<double> y);
double blocked_dot(std::span<const double> x, std::span<const double> y);

}  // namespace serial

}  // namespace perco
