#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sparse_sampler/basis.hpp"
#include "sparse_sampler/domain.hpp"
#include "sparse_sampler/rng.hpp"
#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

enum class Scheme { MonteCarlo, LSOptimalNonhier, LSOptimalHier, CSOptimal, Preconditioned };

std::string to_string(Scheme scheme);
/// "mc", "opt-nonhier", "opt-hier", "cs-opt", "precond".
Scheme parse_scheme(const std::string& text);

inline constexpr double kOffSupportWeight = std::numeric_limits<double>::infinity();

/// Discrete sampling measure over a grid together with its weight function.
///
/// On the support, probs_i * k * weights_i == 1, which is the grid form of
/// d mu = (1/w) d tau. Rows off the support carry probability zero and an
/// infinite weight sentinel; they are never drawn.
struct SamplingPlan {
  Scheme scheme = Scheme::MonteCarlo;
  RealVector probs;
  RealVector weights;

  std::size_t grid_size() const { return static_cast<std::size_t>(probs.size()); }
};

/// Drawn points: grid ids (empty for continuous draws), coordinates and the
/// weight w(y_i) attached to each draw.
struct SampleSet {
  std::vector<std::size_t> point_ids;
  Points points;
  RealVector weights;
  Scheme scheme = Scheme::MonteCarlo;
  StreamId stream;

  std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

/// K(z_i) = k * sum_j |Q_ij|^2 for a grid-orthonormal Q (k x s).
RealVector christoffel_on_grid(const ComplexMatrix& q, double orthonormality_tol = 1e-8);

SamplingPlan monte_carlo_plan(std::size_t k);

/// probs_i = (1/s) sum_j |Q_ij|^2, w(z_i) = s / K(z_i).
SamplingPlan ls_optimal_plan(const ComplexMatrix& q);

/// probs_i = max_j |B_ij|^2 / theta^2, w(z_i) = theta^2 / (k max_j |B_ij|^2)
/// with theta^2 = sum_i max_j |B_ij|^2 and B scaled by 1/sqrt(k).
SamplingPlan cs_optimal_plan(const ComplexMatrix& b);

/// Arcsine-type weight w(y) = prod_k (pi/2) sqrt(1 - y_k^2), renormalized so
/// that (1/k) sum_i 1/w(z_i) = 1 on the grid; probs proportional to 1/w.
SamplingPlan preconditioned_plan(const DiscreteGrid& grid);

/// Unnormalized continuum weight prod_k (pi/2) sqrt(1 - y_k^2).
double preconditioning_weight(std::span<const double> y);

/// m i.i.d. draws by inverse CDF on the cumulative probabilities.
SampleSet draw(const SamplingPlan& plan, const DiscreteGrid& grid, std::size_t m, Rng& rng);

/// Continuous uniform draws (w = 1) on the hypercube or torus.
SampleSet draw_continuous_uniform(const Domain& domain, std::size_t m, Rng& rng);

/// Hierarchical optimal draw: m / s points from each column density
/// |Q_ij|^2. Requires m to be a multiple of s.
SampleSet ls_hierarchical_draw(const ComplexMatrix& q, const DiscreteGrid& grid, std::size_t m,
                               const StreamId& base);

/// Nested hierarchical draws along a ladder of growing subspaces sharing a
/// grid. Column j always draws from stream (base, sub = j), so earlier draws
/// are reused verbatim when the basis grows by appending columns. When m is
/// not a multiple of s, the remaining m - s*floor(m/s) points come from the
/// nonhierarchical mixture, itself a nested stream; the overall law is
/// unchanged.
class HierarchicalSampler {
 public:
  HierarchicalSampler(const DiscreteGrid& grid, StreamId base);

  SampleSet draw(const ComplexMatrix& q, std::size_t m);

 private:
  const DiscreteGrid* grid_;
  StreamId base_;
  std::vector<std::vector<std::size_t>> per_column_;
  std::vector<std::size_t> mixture_;
};

struct ConstantsReport {
  double theta_sq = 0.0;
  double Theta_sq = 0.0;
  double nikolskii_sq = 0.0;
  double riesz_a = 0.0;
  double riesz_b = 0.0;
};

/// theta^2 = sum_i max_j|B_ij|^2, Theta^2 = k max_ij |B_ij|^2,
/// (N)^2 = max_i w_i K(z_i) over the plan support (K from Q), Riesz
/// constants from the singular values of B.
ConstantsReport constants_report(const ComplexMatrix& b, const ComplexMatrix& q,
                                 const RealVector& plan_weights);

/// max_i w_i K_i over finite weights.
double nikolskii_sq(const RealVector& christoffel, const RealVector& weights);

/// Closed-form Theta^2 for tensor Legendre: max_iota prod_k (2 iota_k + 1).
double legendre_Theta_sq(const MultiIndexSet& set);

}  // namespace sparse_sampler
