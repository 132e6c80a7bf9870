#include "sparse_sampler/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparse_sampler {

namespace {

RealVector effective_weights(const RealVector& weights, Eigen::Index n) {
  if (weights.size() == 0) return RealVector::Ones(n);
  return weights;
}

double weighted_block_norm(const ComplexMatrix& z, const RealVector& weights) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < z.rows(); ++j) total += weights(j) * z.row(j).norm();
  return total;
}

}  // namespace

void SrLassoProblem::validate() const {
  if (a.rows() < 1 || a.cols() < 1) throw ShapeError("SR-LASSO: empty design matrix");
  if (v.rows() != a.rows()) throw ShapeError("SR-LASSO: A and V row counts differ");
  if (v.cols() < 1) throw ShapeError("SR-LASSO: V needs at least one column");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("SR-LASSO: lambda must be positive");
  if (weights.size() != 0) {
    if (weights.size() != a.cols()) throw ShapeError("SR-LASSO: one weight per column of A");
    for (Eigen::Index j = 0; j < weights.size(); ++j)
      if (!(weights(j) > 0.0) || !std::isfinite(weights(j)))
        throw DomainError("SR-LASSO: weights must be finite and positive");
  }
  if (!a.allFinite() || !v.allFinite()) throw NumericalError("SR-LASSO: nonfinite data");
  if (options.max_iters < 1 || options.window < 1 || !(options.step_ratio > 0.0))
    throw DomainError("SR-LASSO: invalid solver options");
  if (options.initial && (options.initial->rows() != a.cols() || options.initial->cols() != v.cols()))
    throw ShapeError("SR-LASSO: warm start has the wrong shape");
}

double sr_lasso_objective(const ComplexMatrix& a, const ComplexMatrix& v, double lambda,
                          const RealVector& weights, const ComplexMatrix& z) {
  const RealVector w = effective_weights(weights, a.cols());
  return lambda * weighted_block_norm(z, w) + (a * z - v).norm();
}

ComplexVector block_soft_threshold(const ComplexVector& row, double threshold) {
  if (threshold < 0.0) throw DomainError("block_soft_threshold: negative threshold");
  const double norm = row.norm();
  if (norm <= threshold || norm == 0.0) return ComplexVector::Zero(row.size());
  return row * (1.0 - threshold / norm);
}

double spectral_norm_estimate(const ComplexMatrix& a, int iterations) {
  // Deterministic start vector; a constant vector can be orthogonal to the
  // top singular vector, so mix in a slowly varying ramp.
  ComplexVector x(a.cols());
  for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = Complex(1.0 + 0.37 * std::sin(1.0 + j), 0.0);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const ComplexVector y = a.adjoint() * (a * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    estimate = std::sqrt(norm);
    x = y / norm;
  }
  return estimate;
}

RecoveryResult sr_lasso(const SrLassoProblem& problem) {
  problem.validate();
  const ComplexMatrix& a = problem.a;
  const ComplexMatrix& v = problem.v;
  const SrLassoOptions& opt = problem.options;
  const Eigen::Index n = a.cols();
  const RealVector weights = effective_weights(problem.weights, n);

  // Power iteration underestimates ||A||; pad slightly to keep tau sigma L^2 <= 1.
  const double spectral = 1.01 * spectral_norm_estimate(a, opt.power_iterations);
  const double norm_a = spectral > 0.0 ? spectral : 1.0;
  const double tau = opt.step_ratio / norm_a;
  const double sigma = 1.0 / (opt.step_ratio * norm_a);

  ComplexMatrix z = opt.initial ? *opt.initial : ComplexMatrix::Zero(n, v.cols());
  ComplexMatrix z_bar = z;
  ComplexMatrix y = ComplexMatrix::Zero(a.rows(), v.cols());
  ComplexMatrix z_next(n, v.cols());

  RecoveryResult result;
  result.coefficients = z;
  result.objective = sr_lasso_objective(a, v, problem.lambda, weights, z);
  double previous_objective = result.objective;
  int streak = 0;

  for (int it = 1; it <= opt.max_iters; ++it) {
    // Dual step: prox of sigma F* is projection of (p - sigma V) onto the unit ball.
    y.noalias() += sigma * (a * z_bar - v);
    const double y_norm = y.norm();
    if (y_norm > 1.0) y /= y_norm;

    // Primal step: row-wise block soft thresholding.
    z_next.noalias() = z - tau * (a.adjoint() * y);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double norm = z_next.row(j).norm();
      const double threshold = tau * problem.lambda * weights(j);
      if (norm <= threshold)
        z_next.row(j).setZero();
      else
        z_next.row(j) *= 1.0 - threshold / norm;
    }

    const double step = (z_next - z).norm();
    const double scale = std::max(z_next.norm(), z.norm());
    z_bar = 2.0 * z_next - z;
    z.swap(z_next);

    const double objective = sr_lasso_objective(a, v, problem.lambda, weights, z);
    if (objective < result.objective) {
      result.objective = objective;
      result.coefficients = z;
    }
    const double relative_step = scale > 0.0 ? step / scale : 0.0;
    const double relative_objective =
        std::abs(objective - previous_objective) / std::max(std::abs(objective), std::numeric_limits<double>::min());
    previous_objective = objective;
    result.iterations = it;

    if (relative_step < opt.tolerance && (relative_objective < opt.tolerance || objective == 0.0))
      ++streak;
    else
      streak = 0;
    if (streak >= opt.window) {
      result.converged = true;
      break;
    }
  }
  result.residual_norm = (a * result.coefficients - v).norm();
  return result;
}

double default_lambda(double s, double a) {
  if (!(s >= 1.0) || !(a > 0.0)) throw DomainError("default_lambda: need s >= 1 and a > 0");
  return 15.0 / 26.0 * std::sqrt(a / s);
}

double zero_solution_lambda(const ComplexMatrix& a, const ComplexMatrix& v, const RealVector& weights) {
  const double v_norm = v.norm();
  if (v_norm == 0.0) return 0.0;
  const RealVector w = effective_weights(weights, a.cols());
  const ComplexMatrix correlation = a.adjoint() * v;
  double best = 0.0;
  for (Eigen::Index j = 0; j < correlation.rows(); ++j)
    best = std::max(best, correlation.row(j).norm() / w(j));
  return best / v_norm;
}

RealVector lower_set_weights(const ComplexMatrix& raw_values, const RealVector& grid_weights) {
  if (grid_weights.size() != raw_values.rows()) throw ShapeError("lower_set_weights: one weight per grid row");
  RealVector u = RealVector::Zero(raw_values.cols());
  for (Eigen::Index i = 0; i < raw_values.rows(); ++i) {
    const double w = grid_weights(i);
    if (!std::isfinite(w)) continue;
    const double root = std::sqrt(w);
    for (Eigen::Index j = 0; j < raw_values.cols(); ++j) u(j) = std::max(u(j), root * std::abs(raw_values(i, j)));
  }
  return u;
}

double weighted_cardinality(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("weighted_cardinality: weights must be positive");
    total += w * w;
  }
  return total;
}

double weighted_cardinality(const std::vector<MultiIndex>& subset,
                            const std::function<double(const MultiIndex&)>& weight) {
  std::vector<double> values;
  values.reserve(subset.size());
  for (const auto& index : subset) values.push_back(weight(index));
  return weighted_cardinality(values);
}

double k_lower(std::size_t s, const std::function<double(const MultiIndex&)>& weight, std::size_t d) {
  if (d > 3 || s > 10)
    throw RegimeError("k_lower enumerates lower sets only for d <= 3 and s <= 10; "
                      "use the bound k(s; w) <= theta^2 * s instead");
  if (s < 1) throw DomainError("k_lower: s must be >= 1");
  double best = 0.0;
  for (const auto& set : enumerate_lower_sets(d, s)) best = std::max(best, weighted_cardinality(set, weight));
  return best;
}

double k_lower(std::size_t s, const MultiIndexSet& set, const RealVector& weights) {
  if (weights.size() != static_cast<Eigen::Index>(set.size()))
    throw ShapeError("k_lower: one weight per index");
  const std::size_t d = set.dimension();
  if (d > 3 || s > 10)
    throw RegimeError("k_lower enumerates lower sets only for d <= 3 and s <= 10; "
                      "use the bound k(s; w) <= theta^2 * s instead");
  if (s < 1) throw DomainError("k_lower: s must be >= 1");
  const auto weight = [&](const MultiIndex& index) {
    return weights(static_cast<Eigen::Index>(set.position(index)));
  };
  const auto inside = [&](const MultiIndex& index) { return set.contains(index); };
  double best = 0.0;
  for (const auto& lower : enumerate_lower_sets(d, s, inside))
    best = std::max(best, weighted_cardinality(lower, weight));
  return best;
}

}  // namespace sparse_sampler
