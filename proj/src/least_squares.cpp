#include "sparse_sampler/least_squares.hpp"

#include <cmath>
#include <limits>

#include <Eigen/IterativeLinearSolvers>

namespace sparse_sampler {

std::string to_string(LsSolver solver) {
  switch (solver) {
    case LsSolver::ThinQR:
      return "qr";
    case LsSolver::SVDPseudoinverse:
      return "svd";
    case LsSolver::ConjugateGradient:
      return "cg";
  }
  return "?";
}

LsSolver parse_ls_solver(const std::string& text) {
  if (text == "qr") return LsSolver::ThinQR;
  if (text == "svd") return LsSolver::SVDPseudoinverse;
  if (text == "cg") return LsSolver::ConjugateGradient;
  throw FormatError("unknown least-squares solver '" + text + "'");
}

LsSystem assemble_ls_rows(const ComplexMatrix& raw_rows, const RealVector& weights,
                          const ComplexMatrix& values) {
  const Eigen::Index m = raw_rows.rows();
  if (m < 1) throw ShapeError("assemble_ls: no samples");
  if (weights.size() != m || values.rows() != m)
    throw ShapeError("assemble_ls: sample, weight and value counts differ");
  if (!values.allFinite()) throw NumericalError("assemble_ls: nonfinite sample value");
  LsSystem system{raw_rows, values};
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double w = weights(i);
    if (!std::isfinite(w) || w <= 0.0) throw NumericalError("assemble_ls: nonfinite or nonpositive weight");
    const double scale = std::sqrt(w) * inv_sqrt_m;
    system.a.row(i) *= scale;
    system.v.row(i) *= scale;
  }
  return system;
}

LsSystem assemble_ls(const SampleSet& samples, const DictionarySpec& spec,
                     const ComplexMatrix& values) {
  const ComplexMatrix raw = assemble_eval_matrix(spec, samples.points).values;
  return assemble_ls_rows(raw, samples.weights, values);
}

AlphaBeta estimate_alpha_beta(const ComplexMatrix& a,
                              const std::optional<ComplexMatrix>& orthonormalizer) {
  ComplexMatrix tilde = a;
  if (orthonormalizer) {
    if (orthonormalizer->rows() != a.cols() || orthonormalizer->cols() != a.cols())
      throw ShapeError("estimate_alpha_beta: orthonormalizer must be s x s");
    orthonormalizer->triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(tilde);
  }
  Eigen::BDCSVD<ComplexMatrix> svd(tilde);
  const RealVector& sv = svd.singularValues();
  const double smallest = tilde.rows() < tilde.cols() ? 0.0 : sv(sv.size() - 1);
  return {smallest * smallest, sv(0) * sv(0)};
}

namespace {

ComplexMatrix pseudoinverse_solve(const ComplexMatrix& a, const ComplexMatrix& v) {
  Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double eps = std::numeric_limits<double>::epsilon();
  svd.setThreshold(static_cast<double>(std::max(a.rows(), a.cols())) * eps);
  return svd.solve(v);
}

}  // namespace

FitResult solve_ls(const ComplexMatrix& a, const ComplexMatrix& v, LsSolver solver,
                   const std::optional<ComplexMatrix>& orthonormalizer) {
  if (a.rows() < 1 || a.cols() < 1) throw ShapeError("solve_ls: need m >= 1 and s >= 1");
  if (a.rows() != v.rows()) throw ShapeError("solve_ls: A and V row counts differ");
  FitResult result;
  result.solver = solver;
  const double eps = std::numeric_limits<double>::epsilon();

  switch (solver) {
    case LsSolver::ThinQR: {
      if (a.rows() >= a.cols()) {
        Eigen::HouseholderQR<ComplexMatrix> qr(a);
        const auto diag = qr.matrixQR().diagonal().cwiseAbs();
        const double tol = static_cast<double>(std::max(a.rows(), a.cols())) * eps * diag.maxCoeff();
        if (diag.minCoeff() > tol) {
          result.coefficients = qr.solve(v);
          break;
        }
      }
      result.rank_deficient = true;
      result.solver = LsSolver::SVDPseudoinverse;
      result.coefficients = pseudoinverse_solve(a, v);
      break;
    }
    case LsSolver::SVDPseudoinverse:
      result.coefficients = pseudoinverse_solve(a, v);
      break;
    case LsSolver::ConjugateGradient: {
      Eigen::LeastSquaresConjugateGradient<ComplexMatrix> cg;
      cg.setTolerance(1e-14);
      cg.setMaxIterations(std::max<Eigen::Index>(10 * a.cols(), 100));
      cg.compute(a);
      result.coefficients.resize(a.cols(), v.cols());
      for (Eigen::Index c = 0; c < v.cols(); ++c) result.coefficients.col(c) = cg.solve(v.col(c));
      break;
    }
  }

  const AlphaBeta ab = estimate_alpha_beta(a, orthonormalizer);
  result.alpha_hat = ab.alpha;
  result.beta_hat = ab.beta;
  result.cond_bound = ab.alpha > 0.0 ? std::sqrt(ab.beta / ab.alpha)
                                     : std::numeric_limits<double>::infinity();
  result.residual_norm = (a * result.coefficients - v).norm();
  return result;
}

CoefficientBlock truncate_outputs(const CoefficientBlock& block, Eigen::Index kept) {
  if (kept < 0 || kept > block.cols()) throw ShapeError("truncate_outputs: bad truncation");
  CoefficientBlock out = block;
  out.rightCols(block.cols() - kept).setZero();
  return out;
}

}  // namespace sparse_sampler
