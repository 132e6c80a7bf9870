#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>

#include "sparse_sampler/experiment.hpp"
#include "sparse_sampler/ortho.hpp"

using namespace sparse_sampler;

namespace {

std::shared_ptr<const DiscreteGrid> grid_on(const Domain& dom, std::size_t k, std::uint64_t seed) {
  return std::make_shared<const DiscreteGrid>(mc_grid(dom, k, StreamId{seed, StreamPurpose::Grid, 0, 0}));
}

double max_identity_defect(const ComplexMatrix& q) {
  return (q.adjoint() * q - ComplexMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("orthonormalized Legendre on the annulus") {
  const auto grid = grid_on(Domain::annulus(2), 600, 1);
  const auto spec = DictionarySpec::legendre(gen_hyperbolic_cross(2, 9));
  const auto basis = orthonormalize_on_grid(spec, grid);
  CHECK(max_identity_defect(basis->q()) < 1e-8);
  const RieszConstants rc = riesz_constants(basis->q());
  CHECK(std::abs(rc.a - 1.0) < 1e-10);
  CHECK(std::abs(rc.b - 1.0) < 1e-10);
  for (Eigen::Index j = 0; j < basis->r().cols(); ++j) {
    CHECK(basis->r()(j, j).real() > 0.0);
    CHECK(basis->r()(j, j).imag() == 0.0);
  }
  CHECK((basis->grid_values() - std::sqrt(600.0) * basis->q()).cwiseAbs().maxCoeff() < 1e-12);

  // Off-grid evaluation at grid points reproduces the grid values.
  const ComplexMatrix at_grid = basis->eval(grid->points);
  CHECK((at_grid - basis->grid_values()).cwiseAbs().maxCoeff() < 1e-9);
  const ComplexVector row = eval_ortho_offgrid(*basis, grid->point(17));
  CHECK((row.transpose() - basis->grid_values().row(17)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("span preservation on and off the grid") {
  const auto grid = grid_on(Domain::cut_cube(2), 400, 2);
  const auto spec = DictionarySpec::legendre(gen_total_degree(2, 5));
  const auto basis = orthonormalize_on_grid(spec, grid);
  Rng rng(StreamId{3, StreamPurpose::Problem, 0, 0});
  ComplexMatrix c(static_cast<Eigen::Index>(spec.size()), 2);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = Complex(rng.normal(), rng.normal());
  const ComplexMatrix phi_coeffs = basis->to_source_coefficients(c);
  const auto off = mc_grid(Domain::cut_cube(2), 50, StreamId{4, StreamPurpose::Grid, 0, 0});
  for (const Points* pts : {&grid->points, &off.points}) {
    const ComplexMatrix via_upsilon = basis->eval(*pts) * c;
    const ComplexMatrix via_phi = assemble_eval_matrix(spec, *pts).values * phi_coeffs;
    CHECK((via_upsilon - via_phi).cwiseAbs().maxCoeff() < 1e-8);
  }
  // Linearity of single-point evaluation.
  const ComplexVector v = eval_ortho_offgrid(*basis, off.point(3));
  CHECK(std::abs((v.transpose() * c.col(0))(0) - (basis->eval(off.points).row(3) * c.col(0))(0)) < 1e-10);
}

TEST_CASE("constant dictionary normalizes to one") {
  const auto grid = grid_on(Domain::annulus(3), 50, 5);
  const auto basis = orthonormalize_on_grid(DictionarySpec::legendre(gen_total_degree(3, 0)), grid);
  CHECK((basis->grid_values().array() - Complex(1.0, 0.0)).abs().maxCoeff() < 1e-13);
  CHECK(std::abs(basis->r()(0, 0) - Complex(1.0, 0.0)) < 1e-13);
}

TEST_CASE("Fourier on a full equispaced grid") {
  const auto grid = std::make_shared<const DiscreteGrid>(equispaced_torus_grid(2, 8));
  const auto spec = DictionarySpec::fourier(reorder(signed_variant(gen_hyperbolic_cross(2, 3)), Ordering::TotalDegree));
  const ComplexMatrix b = assemble_eval_matrix(spec, grid->points, Scaling::OneOverSqrtK).values;
  const OrthoBasis basis = orthonormalize(b, spec, grid);
  const ComplexMatrix r = basis.r();
  CHECK((r - ComplexMatrix::Identity(r.rows(), r.cols())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((basis.q() - b).cwiseAbs().maxCoeff() < 1e-12);
  const OrthoConstants oc = ortho_constants(basis);
  CHECK(oc.theta_sq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oc.Theta_sq == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("column order changes the basis") {
  const auto grid = grid_on(Domain::annulus(2), 300, 6);
  const auto set = gen_total_degree(2, 3);
  const auto a = orthonormalize_on_grid(DictionarySpec::legendre(set), grid);
  const auto b = orthonormalize_on_grid(DictionarySpec::legendre(reorder(set, Ordering::Lexicographic)), grid);
  // Same span, different triangular factor.
  const ComplexMatrix projector_a = a->q() * a->q().adjoint();
  const ComplexMatrix projector_b = b->q() * b->q().adjoint();
  CHECK((projector_a - projector_b).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a->q() - b->q()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("rank deficiency is reported with the column") {
  const auto grid = grid_on(Domain::hypercube(1), 100, 7);
  const auto spec = DictionarySpec::legendre(gen_total_degree(1, 2));
  ComplexMatrix b = assemble_eval_matrix(spec, grid->points, Scaling::OneOverSqrtK).values;
  b.col(2) = b.col(1);
  CHECK(riesz_constants(b).a < 1e-12);
  try {
    (void)orthonormalize(b, spec, grid);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }
  OrthoOptions lenient;
  lenient.allow_rank_deficient = true;
  CHECK_NOTHROW((void)orthonormalize(b, spec, grid, lenient));
}

TEST_CASE("constant inequalities") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto grid = grid_on(Domain::annulus(2), 800, seed);
    const auto spec = DictionarySpec::legendre(gen_hyperbolic_cross(2, 11));
    const ComplexMatrix b = assemble_eval_matrix(spec, grid->points, Scaling::OneOverSqrtK).values;
    const OrthoConstants raw = ortho_constants(b);
    CHECK(raw.theta_sq <= raw.Theta_sq);
    CHECK(raw.theta_sq >= riesz_constants(b).a);
    const auto basis = orthonormalize_on_grid(spec, grid);
    const OrthoConstants q = ortho_constants(*basis);
    CHECK(q.theta_sq <= q.Theta_sq);
    CHECK(q.theta_sq >= 1.0 - 1e-12);
  }
}

TEST_CASE("basis save/load is bit exact") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto grid_path = (dir / "ss_ortho_grid.bin").string();
  const auto basis_path = (dir / "ss_ortho_basis.bin").string();
  const auto grid = grid_on(Domain::cut_cube(3), 300, 8);
  save_grid(grid_path, *grid);
  const auto basis = orthonormalize_on_grid(DictionarySpec::legendre(gen_hyperbolic_cross(3, 5)), grid);
  save_ortho_basis(basis_path, *basis, grid_path);
  const auto back = load_ortho_basis(basis_path);
  CHECK(back->r() == basis->r());
  CHECK(back->q() == basis->q());
  CHECK(back->source().index_set == basis->source().index_set);
  std::filesystem::remove(grid_path);
  std::filesystem::remove(basis_path);
}

TEST_CASE("total-degree ordering gives coefficient tails no heavier than lexicographic") {
  const auto grid = grid_on(Domain::annulus(2), 3000, 10);
  const auto set = gen_hyperbolic_cross(2, 29);
  RealVector f(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t i = 0; i < grid->size(); ++i)
    f(static_cast<Eigen::Index>(i)) = eval_test_function(TestFunctionId::F1, grid->point(i));
  auto tail = [&](Ordering ordering) {
    const auto basis = orthonormalize_on_grid(DictionarySpec::legendre(reorder(set, ordering)), grid);
    // Coefficients of the tau-projection: c = Q^* f / sqrt(k).
    const ComplexVector c = basis->q().adjoint() * f.cast<Complex>() / std::sqrt(static_cast<double>(grid->size()));
    std::vector<double> mags(static_cast<std::size_t>(c.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(c(i));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double t = 0.0;
    for (std::size_t i = 50; i < mags.size(); ++i) t += mags[i];
    return t;
  };
  CHECK(tail(Ordering::TotalDegree) <= tail(Ordering::Lexicographic));
}
