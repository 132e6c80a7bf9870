#include "sparse_sampler/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>

#include "sparse_sampler/ortho.hpp"

namespace sparse_sampler {

namespace {

constexpr double kClampSlack = 1e-12;

double clamp_unit(double y) {
  if (!(std::abs(y) <= 1.0 + kClampSlack))
    throw DomainError("Legendre argument " + std::to_string(y) + " outside [-1, 1]");
  return std::clamp(y, -1.0, 1.0);
}

void check_point(const DictionarySpec& spec, std::size_t size) {
  if (size != spec.dimension())
    throw ShapeError("point dimension " + std::to_string(size) +
                     " does not match dictionary dimension " +
                     std::to_string(spec.dimension()));
}

// Fills table(k, e) = phi_e(y_k) for the 1D families, e in [0, max] for
// Legendre and e in [-max, max] (offset by max) for Fourier.
void one_dimensional_tables(const DictionarySpec& spec, std::span<const double> y,
                            int max_degree, std::vector<Complex>& table) {
  const std::size_t d = spec.dimension();
  if (spec.family == BasisFamily::TensorLegendre) {
    const std::size_t width = static_cast<std::size_t>(max_degree) + 1;
    table.assign(d * width, Complex{});
    std::vector<double> buffer(width);
    for (std::size_t k = 0; k < d; ++k) {
      legendre_1d_all(max_degree, y[k], buffer);
      for (std::size_t e = 0; e < width; ++e) table[k * width + e] = buffer[e];
    }
  } else {
    const std::size_t width = 2 * static_cast<std::size_t>(max_degree) + 1;
    table.assign(d * width, Complex{});
    for (std::size_t k = 0; k < d; ++k) {
      for (int e = -max_degree; e <= max_degree; ++e) {
        const double angle = 2.0 * std::numbers::pi * e * y[k];
        table[k * width + static_cast<std::size_t>(e + max_degree)] =
            Complex(std::cos(angle), std::sin(angle));
      }
    }
  }
}

void fill_row(const DictionarySpec& spec, std::span<const double> y, int max_degree,
              std::vector<Complex>& table, Complex* row, Eigen::Index stride,
              Complex factor) {
  one_dimensional_tables(spec, y, max_degree, table);
  const std::size_t d = spec.dimension();
  const bool fourier = spec.family == BasisFamily::TensorFourier;
  const std::size_t width = fourier ? 2 * static_cast<std::size_t>(max_degree) + 1
                                    : static_cast<std::size_t>(max_degree) + 1;
  const int offset = fourier ? max_degree : 0;
  Eigen::Index j = 0;
  for (const auto& index : spec.index_set) {
    Complex value = factor;
    for (std::size_t k = 0; k < d; ++k)
      value *= table[k * width + static_cast<std::size_t>(index[k] + offset)];
    row[j * stride] = value;
    ++j;
  }
}

}  // namespace

void DictionarySpec::validate() const {
  switch (family) {
    case BasisFamily::TensorLegendre:
      if (index_set.signed_entries())
        throw DomainError("tensor Legendre dictionaries need nonnegative indices");
      break;
    case BasisFamily::TensorFourier:
      if (!index_set.signed_entries())
        throw DomainError("tensor Fourier dictionaries need a signed index set");
      break;
    case BasisFamily::GridOrthogonalized:
      if (!ortho) throw DomainError("grid-orthogonalized dictionary without a basis");
      if (ortho->size() != index_set.size())
        throw ShapeError("orthogonalized basis size does not match its index set");
      break;
  }
}

DictionarySpec DictionarySpec::legendre(MultiIndexSet set) {
  DictionarySpec spec{BasisFamily::TensorLegendre, std::move(set), nullptr};
  spec.validate();
  return spec;
}

DictionarySpec DictionarySpec::fourier(MultiIndexSet set) {
  DictionarySpec spec{BasisFamily::TensorFourier, std::move(set), nullptr};
  spec.validate();
  return spec;
}

DictionarySpec DictionarySpec::orthogonalized(std::shared_ptr<const OrthoBasis> basis) {
  DictionarySpec spec{BasisFamily::GridOrthogonalized, basis->source().index_set, basis};
  spec.validate();
  return spec;
}

void legendre_1d_all(int max_degree, double y, std::span<double> out) {
  if (max_degree < 0) throw DomainError("Legendre degree must be >= 0");
  if (out.size() < static_cast<std::size_t>(max_degree) + 1)
    throw ShapeError("legendre_1d_all: output buffer too small");
  const double x = clamp_unit(y);
  // Classical recurrence on P_n, normalized at the end.
  double prev = 1.0;
  double curr = x;
  out[0] = 1.0;
  if (max_degree >= 1) out[1] = std::sqrt(3.0) * x;
  for (int n = 1; n < max_degree; ++n) {
    const double next = ((2.0 * n + 1.0) * x * curr - n * prev) / (n + 1.0);
    prev = curr;
    curr = next;
    out[static_cast<std::size_t>(n) + 1] = std::sqrt(2.0 * (n + 1) + 1.0) * next;
  }
}

double legendre_1d(int degree, double y) {
  if (degree < 0) throw DomainError("Legendre degree must be >= 0");
  const double x = clamp_unit(y);
  if (degree == 0) return 1.0;
  double prev = 1.0;
  double curr = x;
  for (int n = 1; n < degree; ++n) {
    const double next = ((2.0 * n + 1.0) * x * curr - n * prev) / (n + 1.0);
    prev = curr;
    curr = next;
  }
  return std::sqrt(2.0 * degree + 1.0) * curr;
}

double eval_tensor_legendre(const MultiIndex& index, std::span<const double> y) {
  if (index.size() != y.size()) throw ShapeError("eval_tensor_legendre: dimension mismatch");
  double value = 1.0;
  for (std::size_t k = 0; k < y.size(); ++k) value *= legendre_1d(index[k], y[k]);
  return value;
}

Complex eval_tensor_fourier(const MultiIndex& index, std::span<const double> y) {
  if (index.size() != y.size()) throw ShapeError("eval_tensor_fourier: dimension mismatch");
  double phase = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) phase += index[k] * y[k];
  const double angle = 2.0 * std::numbers::pi * phase;
  return {std::cos(angle), std::sin(angle)};
}

ComplexVector eval_dictionary(const DictionarySpec& spec, std::span<const double> y) {
  check_point(spec, y.size());
  if (spec.family == BasisFamily::GridOrthogonalized) return eval_ortho_offgrid(*spec.ortho, y);
  ComplexVector out(static_cast<Eigen::Index>(spec.size()));
  std::vector<Complex> table;
  fill_row(spec, y, spec.index_set.max_entry(), table, out.data(), 1, Complex(1.0));
  return out;
}

EvalMatrix assemble_eval_matrix(const DictionarySpec& spec, const Points& points,
                                Scaling scaling,
                                std::optional<std::span<const double>> weights) {
  spec.validate();
  check_point(spec, static_cast<std::size_t>(points.cols()));
  const Eigen::Index k = points.rows();
  const Eigen::Index n = static_cast<Eigen::Index>(spec.size());
  if ((scaling == Scaling::SqrtWOverSqrtM) != weights.has_value())
    throw ShapeError("weights must be given exactly for SqrtWOverSqrtM scaling");
  if (weights) {
    if (static_cast<Eigen::Index>(weights->size()) != k)
      throw ShapeError("weight count does not match the number of points");
    for (double w : *weights)
      if (!std::isfinite(w) || w <= 0.0)
        throw NumericalError("sample weights must be finite and positive");
  }

  EvalMatrix result;
  result.scaling = scaling;
  if (spec.family == BasisFamily::GridOrthogonalized) {
    result.values = spec.ortho->eval(points);
  } else {
    result.values.resize(k, n);
    std::vector<Complex> table;
    const int max_degree = spec.index_set.max_entry();
    const std::size_t d = spec.dimension();
    for (Eigen::Index i = 0; i < k; ++i) {
      fill_row(spec, {points.row(i).data(), d}, max_degree, table, &result.values(i, 0),
               result.values.outerStride(), Complex(1.0));
    }
  }

  switch (scaling) {
    case Scaling::Raw:
      break;
    case Scaling::OneOverSqrtK:
      result.values /= std::sqrt(static_cast<double>(k));
      break;
    case Scaling::SqrtWOverSqrtM: {
      const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(k));
      for (Eigen::Index i = 0; i < k; ++i)
        result.values.row(i) *= std::sqrt((*weights)[static_cast<std::size_t>(i)]) * inv_sqrt_m;
      break;
    }
  }
  if (!result.values.allFinite()) throw NumericalError("evaluation matrix has nonfinite entries");
  return result;
}

void write_matrix_binary(const std::string& path, const ComplexMatrix& values,
                         Scaling scaling) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  const std::int64_t k = values.rows();
  const std::int64_t n = values.cols();
  const std::int32_t tag = static_cast<std::int32_t>(scaling);
  out.write(reinterpret_cast<const char*>(&k), sizeof k);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&tag), sizeof tag);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double parts[2] = {values(i, j).real(), values(i, j).imag()};
      out.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
  }
  if (!out) throw FormatError("write to '" + path + "' failed");
}

EvalMatrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::int64_t k = 0;
  std::int64_t n = 0;
  std::int32_t tag = 0;
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&tag), sizeof tag);
  if (!in || k < 0 || n < 0 || tag < 0 || tag > 2) throw FormatError("bad matrix header in '" + path + "'");
  EvalMatrix result;
  result.scaling = static_cast<Scaling>(tag);
  result.values.resize(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double parts[2];
      in.read(reinterpret_cast<char*>(parts), sizeof parts);
      result.values(i, j) = Complex(parts[0], parts[1]);
    }
  }
  if (!in) throw FormatError("truncated matrix file '" + path + "'");
  return result;
}

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::TensorLegendre:
      return "legendre";
    case BasisFamily::TensorFourier:
      return "fourier";
    case BasisFamily::GridOrthogonalized:
      return "orthogonalized";
  }
  return "?";
}

BasisFamily parse_basis_family(const std::string& text) {
  if (text == "legendre") return BasisFamily::TensorLegendre;
  if (text == "fourier") return BasisFamily::TensorFourier;
  if (text == "orthogonalized" || text == "ortho") return BasisFamily::GridOrthogonalized;
  throw FormatError("unknown basis family '" + text + "'");
}

}  // namespace sparse_sampler
