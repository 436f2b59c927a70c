#include "perco/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "perco/rng.hpp"

namespace perco {

namespace {

constexpr std::size_t kBlock = 4096;

bool is_bipartite(const Graph& g) {
  std::vector<int> side(static_cast<std::size_t>(g.vertex_count()), -1);
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    if (side[s] >= 0) continue;
    side[s] = 0;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (const auto& inc : g.neighbors(x)) {
        if (side[inc.neighbor] < 0) {
          side[inc.neighbor] = 1 - side[x];
          stack.push_back(inc.neighbor);
        } else if (side[inc.neighbor] == side[x]) {
          return false;
        }
      }
    }
  }
  return true;
}

void scale(std::span<double> x, double factor) {
  for (double& v : x) v *= factor;
}

void remove_mean(std::span<double> x) {
  std::vector<double> ones(x.size(), 1.0);
  const double mean = blocked_dot(x, ones) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

struct PowerResult {
  double rayleigh = 0.0;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<double> vector;
  std::vector<double> image;
};

// Power iteration for the top eigenvalue of a symmetric operator, optionally
// restricted to the orthogonal complement of the constants. `tol` bounds
// ||Mx - theta x|| / (theta ||x||).
PowerResult power_iterate(const WalkOperator& op, std::vector<double> x, bool deflate_constants,
                          double tol, long max_iterations) {
  PowerResult r;
  std::vector<double> y(x.size());
  if (deflate_constants) remove_mean(x);
  scale(x, 1.0 / std::sqrt(blocked_dot(x, x)));
  for (long it = 1; it <= max_iterations; ++it) {
    op.apply(x, y);
    if (deflate_constants) remove_mean(y);
    const double theta = blocked_dot(x, y);
    double res2 = 0.0;
    {
      std::vector<double> diff(y);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= theta * x[i];
      res2 = blocked_dot(diff, diff);
    }
    r.rayleigh = theta;
    r.residual = std::sqrt(std::max(res2, 0.0));
    r.iterations = it;
    if (r.residual <= tol * std::abs(theta) || theta == 0.0) {
      r.converged = true;
      r.vector = x;
      r.image = y;
      return r;
    }
    const double norm = std::sqrt(blocked_dot(y, y));
    if (norm == 0.0) {
      r.converged = true;
      r.vector = x;
      r.image = y;
      return r;
    }
    std::swap(x, y);
    scale(x, 1.0 / norm);
  }
  op.apply(x, y);
  if (deflate_constants) remove_mean(y);
  r.vector = std::move(x);
  r.image = std::move(y);
  return r;
}

}  // namespace

std::string_view method_name(SpectralMethod m) noexcept {
  switch (m) {
    case SpectralMethod::dirichlet_power:
      return "dirichlet_power";
    case SpectralMethod::gap_power:
      return "gap_power";
    case SpectralMethod::exact_enumeration:
      return "exact_enumeration";
  }
  return "unknown";
}

WalkOperator::WalkOperator(const Graph& g, double inverse_degree, bool lazy)
    : WalkOperator(g, std::vector<char>(static_cast<std::size_t>(g.vertex_count()), 1),
                   inverse_degree, lazy) {}

WalkOperator::WalkOperator(const Graph& g, std::span<const char> keep, double inverse_degree,
                           bool lazy)
    : inverse_degree_(inverse_degree), lazy_(lazy) {
  std::vector<int> index(static_cast<std::size_t>(g.vertex_count()), -1);
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (keep[v]) {
      index[v] = static_cast<int>(vertices_.size());
      vertices_.push_back(v);
    }
  for (Vertex v : vertices_) {
    for (const auto& inc : g.neighbors(v))
      if (index[inc.neighbor] >= 0) columns_.push_back(index[inc.neighbor]);
    offsets_.push_back(static_cast<int>(columns_.size()));
  }
}

void WalkOperator::apply(std::span<const double> x, std::span<double> y) const {
  const auto n = static_cast<long>(size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) sum += x[columns_[k]];
    sum *= inverse_degree_;
    y[i] = lazy_ ? 0.5 * (x[i] + sum) : sum;
  }
}

double blocked_dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t blocks = (x.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(x.size(), lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

namespace serial {

void apply(const WalkOperator& op, std::span<const double> x, std::span<double> y) {
  const auto& off = op.offsets();
  const auto& col = op.columns();
  for (std::size_t i = 0; i < op.size(); ++i) {
    double sum = 0.0;
    for (int k = off[i]; k < off[i + 1]; ++k) sum += x[col[k]];
    sum *= op.inverse_degree();
    y[i] = op.lazy() ? 0.5 * (x[i] + sum) : sum;
  }
}

double blocked_dot(std::span<const double> x, std::span<const double> y) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < x.size(); lo += kBlock) {
    const std::size_t hi = std::min(x.size(), lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    total += s;
  }
  return total;
}

}  // namespace serial

SpectralEstimate lambda1_dirichlet(const RootedBall& ball, double tol, long max_iterations) {
  if (ball.radius < 1) throw std::invalid_argument("lambda1_dirichlet: radius must be >= 1");
  const Graph& g = ball.graph;
  std::vector<char> keep(static_cast<std::size_t>(g.vertex_count()), 0);
  int degree = -1;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (!ball.interior(v)) continue;
    keep[v] = 1;
    if (degree < 0) degree = g.degree(v);
    if (g.degree(v) != degree)
      throw std::invalid_argument("lambda1_dirichlet: interior vertices have unequal degrees");
  }
  const WalkOperator op(g, keep, 1.0 / degree, true);
  PowerResult r = power_iterate(op, std::vector<double>(op.size(), 1.0), false, tol, max_iterations);

  // Collatz-Wielandt: min and max of (Mx)_i / x_i enclose rho(M) for x > 0.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < r.vector.size(); ++i) {
    if (r.vector[i] <= 0.0) {
      lo = 0.0;
      hi = 1.0;
      break;
    }
    const double ratio = r.image[i] / r.vector[i];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  SpectralEstimate est;
  est.method = SpectralMethod::dirichlet_power;
  est.iterations = r.iterations;
  est.converged = r.converged;
  est.residual = 2.0 * r.residual;
  // rho(P_int) = 2 rho(M) - 1, so lambda = 2 (1 - rho(M)).
  est.value = 2.0 * (1.0 - r.rayleigh);
  est.lower = std::min(est.value, 2.0 * (1.0 - hi));
  est.upper = std::max(est.value, 2.0 * (1.0 - lo));
  return est;
}

SpectralEstimate spectral_gap(const Graph& g, double tol, long max_iterations) {
  const auto degree = g.regular_degree();
  if (!degree || *degree == 0) throw std::invalid_argument("spectral_gap: graph must be regular");
  if (g.component_count() != 1) throw std::invalid_argument("spectral_gap: graph is disconnected");
  const std::size_t n = static_cast<std::size_t>(g.vertex_count());
  SpectralEstimate est;
  est.method = SpectralMethod::gap_power;
  if (n == 1) {
    est.value = est.lower = est.upper = 1.0;
    return est;
  }
  std::vector<double> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = hashed_uniform(0x5eed5eedULL, i) - 0.5;

  const WalkOperator lazy(g, 1.0 / *degree, true);
  PowerResult r = power_iterate(lazy, start, true, tol, max_iterations);
  const double lambda2 = 2.0 * r.rayleigh - 1.0;
  est.value = 1.0 - lambda2;
  est.residual = 2.0 * r.residual;
  // Rayleigh quotients on the complement of constants never exceed lambda_2.
  est.upper = est.value;
  est.lower = est.value - est.residual;
  est.iterations = r.iterations;
  est.converged = r.converged;

  if (is_bipartite(g)) {
    // For bipartite graphs lambda_min = -1, witnessed exactly by the
    // alternating sign vector, so 1 - |lambda_min| = 0.
    est.bipartite_gap = 0.0;
  }
  return est;
}

SpectralEstimate cheeger_bracket(const Graph& g) {
  const int n = g.vertex_count();
  if (n < 2 || g.component_count() != 1)
    throw std::invalid_argument("cheeger_bracket: graph must be connected with >= 2 vertices");
  SpectralEstimate est;
  if (n <= 20) {
    est.method = SpectralMethod::exact_enumeration;
    std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v)
      for (const auto& inc : g.neighbors(v)) nbrs[v].push_back(inc.neighbor);
    // Gray-code walk over all subsets, tracking the cut size incrementally.
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t set = 0;
    long cut = 0;
    const std::uint32_t total = 1u << n;
    for (std::uint32_t i = 1; i < total; ++i) {
      const int v = std::countr_zero(i);
      const std::uint32_t bit = 1u << v;
      long inside = 0;
      for (Vertex u : nbrs[v]) inside += (set >> u) & 1u;
      const long outside = static_cast<long>(nbrs[v].size()) - inside;
      if (set & bit) {
        set &= ~bit;
        cut -= outside - inside;
      } else {
        set |= bit;
        cut += outside - inside;
      }
      const int size = std::popcount(set);
      if (size > 0 && 2 * size <= n) best = std::min(best, static_cast<double>(cut) / size);
      ++est.iterations;
    }
    est.value = est.lower = est.upper = best;
    return est;
  }
  const auto degree = g.regular_degree();
  if (!degree)
    throw std::invalid_argument("cheeger_bracket: spectral bracket requires a regular graph");
  const SpectralEstimate gap = spectral_gap(g, 1e-8);
  const double d = *degree;
  est.method = SpectralMethod::gap_power;
  est.lower = d * gap.lower / 2.0;
  est.upper = d * std::sqrt(2.0 * gap.upper);
  est.value = 0.5 * (est.lower + est.upper);
  est.iterations = gap.iterations;
  est.residual = gap.residual;
  est.converged = gap.converged;
  return est;
}

}  // namespace perco
