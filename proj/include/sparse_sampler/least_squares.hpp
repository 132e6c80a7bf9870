#pragma once

#include <optional>
#include <string>

#include "sparse_sampler/basis.hpp"
#include "sparse_sampler/sampling.hpp"
#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

enum class LsSolver { ThinQR, SVDPseudoinverse, ConjugateGradient };

std::string to_string(LsSolver solver);
LsSolver parse_ls_solver(const std::string& text);

/// Weighted least-squares system: A = (sqrt(w_i) phi_j(y_i)) / sqrt(m),
/// V = (sqrt(w_i) values_i) / sqrt(m).
struct LsSystem {
  ComplexMatrix a;
  ComplexMatrix v;
};

struct FitResult {
  CoefficientBlock coefficients;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double cond_bound = 0.0;
  double residual_norm = 0.0;
  LsSolver solver = LsSolver::ThinQR;
  /// True when the QR path detected rank deficiency and fell back to SVD.
  bool rank_deficient = false;
};

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

LsSystem assemble_ls(const SampleSet& samples, const DictionarySpec& spec,
                     const ComplexMatrix& values);

/// Same as assemble_ls with precomputed dictionary rows (m x s, raw).
LsSystem assemble_ls_rows(const ComplexMatrix& raw_rows, const RealVector& weights,
                          const ComplexMatrix& values);

/// Extreme eigenvalues of G = A~^* A~, A~ = A R^{-1}. Pass the grid QR factor
/// R whenever the columns of A are not already tau-orthonormal.
AlphaBeta estimate_alpha_beta(const ComplexMatrix& a,
                              const std::optional<ComplexMatrix>& orthonormalizer = std::nullopt);

/// C = A^+ V. The thin QR path falls back to the SVD pseudoinverse when the
/// smallest |R_jj| drops below max(m, s) * eps * max |R_jj|.
FitResult solve_ls(const ComplexMatrix& a, const ComplexMatrix& v,
                   LsSolver solver = LsSolver::ThinQR,
                   const std::optional<ComplexMatrix>& orthonormalizer = std::nullopt);

/// Zeroes output columns at and beyond `kept` (coordinate truncation P_h).
CoefficientBlock truncate_outputs(const CoefficientBlock& block, Eigen::Index kept);

}  // namespace sparse_sampler
