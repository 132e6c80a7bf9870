#pragma once

#include <memory>
#include <span>
#include <string>

#include "sparse_sampler/basis.hpp"
#include "sparse_sampler/domain.hpp"
#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

struct OrthoOptions {
  /// Columns whose R diagonal falls below factor * k * eps * max|R_jj| are
  /// rejected. Set `allow_rank_deficient` to keep a numerically degenerate
  /// basis (Q still has orthonormal columns) for constant reporting.
  double rank_tolerance_factor = 1.0;
  bool allow_rank_deficient = false;
};

/// Dictionary orthonormalized over the uniform measure of a grid:
/// B = Q R with B = (phi_{iota_j}(z_i) / sqrt(k)), diag(R) > 0.
/// upsilon_{iota_i} = sum_{j <= i} (R^{-T})_{ij} phi_{iota_j}.
class OrthoBasis {
 public:
  OrthoBasis(ComplexMatrix q, ComplexMatrix r, DictionarySpec source,
             std::shared_ptr<const DiscreteGrid> grid);

  const ComplexMatrix& q() const { return q_; }
  const ComplexMatrix& r() const { return r_; }
  const DictionarySpec& source() const { return source_; }
  const std::shared_ptr<const DiscreteGrid>& grid() const { return grid_; }
  std::size_t size() const { return static_cast<std::size_t>(q_.cols()); }
  std::size_t grid_size() const { return static_cast<std::size_t>(q_.rows()); }

  /// Values of upsilon at the grid: sqrt(k) * Q.
  ComplexMatrix grid_values() const;

  /// upsilon values at arbitrary points (rows), via a triangular solve
  /// against R applied to the raw dictionary values.
  ComplexMatrix eval(const Points& points) const;

  /// Maps coefficients in the upsilon basis to coefficients in phi.
  ComplexMatrix to_source_coefficients(const ComplexMatrix& upsilon_coeffs) const;

 private:
  ComplexMatrix q_;
  ComplexMatrix r_;
  DictionarySpec source_;
  std::shared_ptr<const DiscreteGrid> grid_;
};

/// Thin Householder QR of `b` (k x n, expected 1/sqrt(k) scaling) with the
/// diagonal of R made real positive.
OrthoBasis orthonormalize(const ComplexMatrix& b, DictionarySpec source,
                          std::shared_ptr<const DiscreteGrid> grid,
                          const OrthoOptions& options = {});

/// Convenience: evaluates `source` on `grid`, scales by 1/sqrt(k), factors.
std::shared_ptr<const OrthoBasis> orthonormalize_on_grid(
    const DictionarySpec& source, std::shared_ptr<const DiscreteGrid> grid,
    const OrthoOptions& options = {});

struct RieszConstants {
  double a = 0.0;
  double b = 0.0;
};

/// Squared extreme singular values of b.
RieszConstants riesz_constants(const ComplexMatrix& b);

ComplexVector eval_ortho_offgrid(const OrthoBasis& basis, std::span<const double> y);

struct OrthoConstants {
  double theta_sq = 0.0;
  double Theta_sq = 0.0;
};

/// theta^2 = sum_i max_j |Q_ij|^2, Theta^2 = k max_ij |Q_ij|^2.
OrthoConstants ortho_constants(const OrthoBasis& basis);
OrthoConstants ortho_constants(const ComplexMatrix& q);

/// Binary basis file: magic, grid file path, index-set text, family tag and
/// the packed upper triangle of R. Loading refactors the grid and checks R
/// bit for bit.
void save_ortho_basis(const std::string& path, const OrthoBasis& basis,
                      const std::string& grid_path);
std::shared_ptr<const OrthoBasis> load_ortho_basis(const std::string& path);

}  // namespace sparse_sampler
