#include "sparse_sampler/ortho.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace sparse_sampler {

OrthoBasis::OrthoBasis(ComplexMatrix q, ComplexMatrix r, DictionarySpec source,
                       std::shared_ptr<const DiscreteGrid> grid)
    : q_(std::move(q)), r_(std::move(r)), source_(std::move(source)), grid_(std::move(grid)) {
  if (r_.rows() != r_.cols() || r_.cols() != q_.cols())
    throw ShapeError("OrthoBasis: Q is k x n and R must be n x n");
  if (source_.family == BasisFamily::GridOrthogonalized)
    throw DomainError("OrthoBasis: source dictionary must be a raw family");
  if (source_.size() != static_cast<std::size_t>(q_.cols()))
    throw ShapeError("OrthoBasis: source index set size does not match Q");
}

ComplexMatrix OrthoBasis::grid_values() const {
  return q_ * std::sqrt(static_cast<double>(q_.rows()));
}

ComplexMatrix OrthoBasis::eval(const Points& points) const {
  ComplexMatrix raw = assemble_eval_matrix(source_, points).values;
  // upsilon(y)^T = phi(y)^T R^{-1}
  r_.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(raw);
  return raw;
}

ComplexMatrix OrthoBasis::to_source_coefficients(const ComplexMatrix& upsilon_coeffs) const {
  if (upsilon_coeffs.rows() != r_.rows()) throw ShapeError("coefficient rows do not match basis size");
  return r_.triangularView<Eigen::Upper>().solve(upsilon_coeffs);
}

OrthoBasis orthonormalize(const ComplexMatrix& b, DictionarySpec source,
                          std::shared_ptr<const DiscreteGrid> grid,
                          const OrthoOptions& options) {
  const Eigen::Index k = b.rows();
  const Eigen::Index n = b.cols();
  if (k < n) throw ShapeError("orthonormalize needs at least as many grid points as functions");
  if (n < 1) throw ShapeError("orthonormalize needs at least one column");
  if (!b.allFinite()) throw NumericalError("orthonormalize: nonfinite input");

  Eigen::HouseholderQR<ComplexMatrix> qr(b);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(k, n);
  ComplexMatrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();

  double max_diag = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) max_diag = std::max(max_diag, std::abs(r(j, j)));
  const double tolerance = options.rank_tolerance_factor * static_cast<double>(k) *
                           std::numeric_limits<double>::epsilon() * max_diag;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double magnitude = std::abs(r(j, j));
    if (!options.allow_rank_deficient && magnitude < tolerance) {
      std::ostringstream msg;
      msg << "orthonormalize: numerical rank < n, column " << j;
      if (static_cast<std::size_t>(j) < source.index_set.size()) {
        msg << " (index";
        for (int e : source.index_set[static_cast<std::size_t>(j)]) msg << ' ' << e;
        msg << ')';
      }
      msg << " has |R_jj| = " << magnitude;
      throw NumericalError(msg.str());
    }
    // Rotate so that R_jj is real and positive.
    const Complex phase = magnitude > 0.0 ? r(j, j) / magnitude : Complex(1.0);
    r.row(j) *= std::conj(phase);
    r(j, j) = Complex(std::abs(r(j, j)), 0.0);
    q.col(j) *= phase;
  }
  return OrthoBasis(std::move(q), std::move(r), std::move(source), std::move(grid));
}

std::shared_ptr<const OrthoBasis> orthonormalize_on_grid(
    const DictionarySpec& source, std::shared_ptr<const DiscreteGrid> grid,
    const OrthoOptions& options) {
  if (!grid) throw DomainError("orthonormalize_on_grid: missing grid");
  const ComplexMatrix b = assemble_eval_matrix(source, grid->points, Scaling::OneOverSqrtK).values;
  return std::make_shared<const OrthoBasis>(orthonormalize(b, source, std::move(grid), options));
}

RieszConstants riesz_constants(const ComplexMatrix& b) {
  if (b.size() == 0) throw ShapeError("riesz_constants: empty matrix");
  Eigen::BDCSVD<ComplexMatrix> svd(b);
  const RealVector& sv = svd.singularValues();
  const double smallest = b.rows() < b.cols() ? 0.0 : sv(sv.size() - 1);
  return {smallest * smallest, sv(0) * sv(0)};
}

ComplexVector eval_ortho_offgrid(const OrthoBasis& basis, std::span<const double> y) {
  if (y.size() != basis.source().dimension()) throw ShapeError("eval_ortho_offgrid: dimension mismatch");
  Points point(1, static_cast<Eigen::Index>(y.size()));
  for (std::size_t k = 0; k < y.size(); ++k) point(0, static_cast<Eigen::Index>(k)) = y[k];
  return basis.eval(point).row(0).transpose();
}

OrthoConstants ortho_constants(const ComplexMatrix& q) {
  const RealVector row_max = q.cwiseAbs2().rowwise().maxCoeff();
  return {row_max.sum(), static_cast<double>(q.rows()) * row_max.maxCoeff()};
}

OrthoConstants ortho_constants(const OrthoBasis& basis) { return ortho_constants(basis.q()); }

namespace {

constexpr char kMagic[8] = {'S', 'S', 'O', 'R', 'T', 'H', 'O', '1'};

void write_string(std::ostream& out, const std::string& s) {
  const std::int64_t len = static_cast<std::int64_t>(s.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  std::int64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len < 0 || len > (std::int64_t{1} << 32)) throw FormatError("basis file: bad string length");
  std::string s(static_cast<std::size_t>(len), '\0');
  in.read(s.data(), len);
  return s;
}

}  // namespace

void save_ortho_basis(const std::string& path, const OrthoBasis& basis,
                      const std::string& grid_path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof kMagic);
  const std::int32_t family = static_cast<std::int32_t>(basis.source().family);
  out.write(reinterpret_cast<const char*>(&family), sizeof family);
  write_string(out, grid_path);
  std::ostringstream set_text;
  write_index_set(set_text, basis.source().index_set);
  write_string(out, set_text.str());
  const std::int64_t n = basis.r().rows();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double parts[2] = {basis.r()(i, j).real(), basis.r()(i, j).imag()};
      out.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
  }
  if (!out) throw FormatError("write to '" + path + "' failed");
}

std::shared_ptr<const OrthoBasis> load_ortho_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw FormatError("'" + path + "' is not a basis file");
  std::int32_t family = 0;
  in.read(reinterpret_cast<char*>(&family), sizeof family);
  const std::string grid_path = read_string(in);
  std::istringstream set_text(read_string(in));
  MultiIndexSet set = read_index_set(set_text);
  std::int64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n != static_cast<std::int64_t>(set.size())) throw FormatError("basis file: size mismatch");
  ComplexMatrix stored = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double parts[2];
      in.read(reinterpret_cast<char*>(parts), sizeof parts);
      stored(i, j) = Complex(parts[0], parts[1]);
    }
  }
  if (!in) throw FormatError("truncated basis file '" + path + "'");

  auto grid = std::make_shared<const DiscreteGrid>(load_grid(grid_path));
  DictionarySpec source{static_cast<BasisFamily>(family), std::move(set), nullptr};
  OrthoOptions options;
  options.allow_rank_deficient = true;
  auto basis = orthonormalize_on_grid(source, grid, options);
  if (basis->r() != stored)
    throw FormatError("basis file '" + path + "': refactored R differs from the stored factor");
  return basis;
}

}  // namespace sparse_sampler
