#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "sparse_sampler/index_sets.hpp"
#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

struct SrLassoOptions {
  int max_iters = 4000;
  double tolerance = 1e-8;
  /// Iterations over which both stopping tests must hold.
  int window = 10;
  /// Primal step = ratio / L, dual step = 1 / (ratio L); product is 1 / L^2.
  double step_ratio = 1.0;
  int power_iterations = 30;
  /// Optional warm start (n x K).
  std::optional<ComplexMatrix> initial;
};

/// min_z  lambda * sum_j v_j ||z_j||_2 + ||A z - V||_F
/// with z_j the j-th row of z (vector-valued, block sparsity).
struct SrLassoProblem {
  ComplexMatrix a;
  ComplexMatrix v;
  double lambda = 1.0;
  /// Empty means all ones.
  RealVector weights;
  SrLassoOptions options;

  void validate() const;
};

struct RecoveryResult {
  CoefficientBlock coefficients;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;
};

/// Objective of the weighted SR-LASSO at z.
double sr_lasso_objective(const ComplexMatrix& a, const ComplexMatrix& v, double lambda,
                          const RealVector& weights, const ComplexMatrix& z);

/// Primal-dual (Chambolle-Pock) iterations on the saddle-point form with the
/// data term kept nonsmooth; its dual prox is projection onto the unit
/// Frobenius ball. Returns the best-objective iterate seen.
RecoveryResult sr_lasso(const SrLassoProblem& problem);

/// row * max(0, 1 - threshold / ||row||).
ComplexVector block_soft_threshold(const ComplexVector& row, double threshold);

/// Largest singular value of A by power iteration.
double spectral_norm_estimate(const ComplexMatrix& a, int iterations);

/// (15/26) sqrt(a / s), the SR-LASSO parameter with alpha = 1.
double default_lambda(double s, double a = 1.0);

/// Smallest lambda for which z = 0 is optimal:
/// max_j ||(A^* V)_j|| / (v_j ||V||_F).
double zero_solution_lambda(const ComplexMatrix& a, const ComplexMatrix& v,
                            const RealVector& weights = {});

/// u_iota = max_i sqrt(w_i) |phi_iota(z_i)| over the grid rows with finite
/// weight. `raw_values` is the unscaled k x n grid evaluation.
RealVector lower_set_weights(const ComplexMatrix& raw_values, const RealVector& grid_weights);

/// |S|_v = sum v_iota^2.
double weighted_cardinality(std::span<const double> weights);
double weighted_cardinality(const std::vector<MultiIndex>& subset,
                            const std::function<double(const MultiIndex&)>& weight);

/// k(s; v) = max |S|_v over lower S with |S| <= s, by exhaustive lower-set
/// enumeration. Only for d <= 3, s <= 10; beyond that use theta^2 * s.
double k_lower(std::size_t s, const std::function<double(const MultiIndex&)>& weight,
               std::size_t d);
/// Weights given on an index set; lower sets leaving the set are skipped.
double k_lower(std::size_t s, const MultiIndexSet& set, const RealVector& weights);

}  // namespace sparse_sampler
