#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparse_sampler/index_sets.hpp"
#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

class OrthoBasis;

enum class BasisFamily { TensorLegendre, TensorFourier, GridOrthogonalized };

/// Which dictionary {phi_iota : iota in I} a matrix is built from.
struct DictionarySpec {
  BasisFamily family = BasisFamily::TensorLegendre;
  MultiIndexSet index_set;
  /// Set only for GridOrthogonalized.
  std::shared_ptr<const OrthoBasis> ortho;

  std::size_t dimension() const { return index_set.dimension(); }
  std::size_t size() const { return index_set.size(); }

  /// Throws when the family and index set are incompatible.
  void validate() const;

  static DictionarySpec legendre(MultiIndexSet set);
  static DictionarySpec fourier(MultiIndexSet set);
  static DictionarySpec orthogonalized(std::shared_ptr<const OrthoBasis> basis);
};

enum class Scaling { Raw = 0, OneOverSqrtK = 1, SqrtWOverSqrtM = 2 };

/// Dense k x n evaluation matrix, entry (i, j) = scaling * phi_{iota_j}(point_i).
struct EvalMatrix {
  ComplexMatrix values;
  Scaling scaling = Scaling::Raw;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Orthonormal Legendre polynomial sqrt(2n+1) P_n(y) with respect to dy/2
/// on [-1, 1]. Inputs within 1e-12 outside the interval are clamped.
double legendre_1d(int degree, double y);

/// Values p_0(y), ..., p_{max_degree}(y) in one recurrence sweep.
void legendre_1d_all(int max_degree, double y, std::span<double> out);

double eval_tensor_legendre(const MultiIndex& index, std::span<const double> y);

/// exp(2 pi i iota . y) on the torus [0,1)^d.
Complex eval_tensor_fourier(const MultiIndex& index, std::span<const double> y);

/// Raw values phi_iota(y) for every iota in `spec`, at one point.
ComplexVector eval_dictionary(const DictionarySpec& spec, std::span<const double> y);

/// Assembles the evaluation matrix. `weights` must be supplied exactly when
/// `scaling == SqrtWOverSqrtM` (then m = points.rows()).
EvalMatrix assemble_eval_matrix(const DictionarySpec& spec, const Points& points,
                                Scaling scaling = Scaling::Raw,
                                std::optional<std::span<const double>> weights = std::nullopt);

/// Binary layout (little-endian): int64 k, int64 n, int32 scaling tag, then
/// k*n entries in row-major order as interleaved (re, im) doubles.
void write_matrix_binary(const std::string& path, const ComplexMatrix& values,
                         Scaling scaling);
EvalMatrix read_matrix_binary(const std::string& path);

std::string to_string(BasisFamily family);
BasisFamily parse_basis_family(const std::string& text);

}  // namespace sparse_sampler
