#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparse_sampler/basis.hpp"
#include "sparse_sampler/domain.hpp"
#include "sparse_sampler/experiment.hpp"
#include "sparse_sampler/index_sets.hpp"
#include "sparse_sampler/least_squares.hpp"
#include "sparse_sampler/ortho.hpp"
#include "sparse_sampler/sampling.hpp"
#include "sparse_sampler/sparse_recovery.hpp"

namespace py = pybind11;
using namespace sparse_sampler;

namespace {

DiscreteGrid grid_from(const Points& points) {
  DiscreteGrid g;
  g.points = points;
  return g;
}

DictionarySpec dictionary(const std::string& family, const MultiIndexSet& set) {
  switch (parse_basis_family(family)) {
    case BasisFamily::TensorLegendre: return DictionarySpec::legendre(set);
    case BasisFamily::TensorFourier: return DictionarySpec::fourier(set);
    default: throw DomainError("use orthonormalize() for the grid-orthogonalized basis");
  }
}

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  d["coefficients"] = r.coefficients;
  d["alpha_hat"] = r.alpha_hat;
  d["beta_hat"] = r.beta_hat;
  d["cond_bound"] = r.cond_bound;
  d["residual_norm"] = r.residual_norm;
  d["solver"] = to_string(r.solver);
  d["rank_deficient"] = r.rank_deficient;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<SamplingError>(m, "SamplingError", base.ptr());
  py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());

  py::class_<MultiIndexSet>(m, "MultiIndexSet")
      .def(py::init([](std::size_t d, std::vector<MultiIndex> indices) {
             return MultiIndexSet(d, std::move(indices), Ordering::Given);
           }),
           py::arg("dimension"), py::arg("indices"))
      .def_property_readonly("dimension", &MultiIndexSet::dimension)
      .def_property_readonly("indices", &MultiIndexSet::indices)
      .def_property_readonly("order", &MultiIndexSet::order)
      .def_property_readonly("family", [](const MultiIndexSet& s) { return to_string(s.family()); })
      .def_property_readonly("ordering", [](const MultiIndexSet& s) { return to_string(s.ordering()); })
      .def("__len__", &MultiIndexSet::size)
      .def("__getitem__", [](const MultiIndexSet& s, std::size_t i) {
        if (i >= s.size()) throw py::index_error();
        return s[i];
      })
      .def("__contains__", &MultiIndexSet::contains)
      .def("position", [](const MultiIndexSet& s, const MultiIndex& i) -> std::optional<std::size_t> {
        const auto p = s.position(i);
        if (p == s.size()) return std::nullopt;
        return p;
      })
      .def("is_lower", [](const MultiIndexSet& s) { return is_lower(s); })
      .def("__eq__", [](const MultiIndexSet& a, const MultiIndexSet& b) { return a == b; });

  m.def(
      "index_set",
      [](const std::string& family, std::size_t d, int t, const std::string& ordering) {
        return gen_index_set(parse_family(family), d, t, parse_ordering(ordering));
      },
      py::arg("family"), py::arg("d"), py::arg("t"), py::arg("ordering") = "total_degree",
      "family: tp | td | hc (same tokens as the CLI).");
  m.def("signed_variant", [](const MultiIndexSet& s) { return signed_variant(s); });

  m.def("legendre_1d", &legendre_1d, py::arg("degree"), py::arg("y"));
  m.def(
      "eval_matrix",
      [](const std::string& family, const MultiIndexSet& set, const Points& points) {
        return assemble_eval_matrix(dictionary(family, set), points).values;
      },
      py::arg("family"), py::arg("index_set"), py::arg("points"),
      "Raw k x n matrix phi_j(y_i) for the legendre or fourier dictionary.");

  m.def(
      "grid",
      [](const std::string& domain, std::size_t d, std::size_t k, std::uint64_t seed) {
        return mc_grid(parse_domain(domain, d), k, StreamId{seed, StreamPurpose::Grid, 0, 0}).points;
      },
      py::arg("domain"), py::arg("d"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "contains",
      [](const std::string& domain, const Points& points) {
        const Domain dom = parse_domain(domain, static_cast<std::size_t>(points.cols()));
        std::vector<bool> out(static_cast<std::size_t>(points.rows()));
        for (Eigen::Index i = 0; i < points.rows(); ++i)
          out[static_cast<std::size_t>(i)] = dom.contains({points.row(i).data(), static_cast<std::size_t>(points.cols())});
        return out;
      },
      py::arg("domain"), py::arg("points"));

  py::class_<OrthoBasis, std::shared_ptr<OrthoBasis>>(m, "OrthoBasis")
      .def_property_readonly("q", &OrthoBasis::q)
      .def_property_readonly("r", &OrthoBasis::r)
      .def("grid_values", &OrthoBasis::grid_values)
      .def("eval", &OrthoBasis::eval, py::arg("points"))
      .def("to_source_coefficients", &OrthoBasis::to_source_coefficients)
      .def("constants", [](const OrthoBasis& b) {
        const auto c = ortho_constants(b);
        return py::dict(py::arg("theta_sq") = c.theta_sq, py::arg("Theta_sq") = c.Theta_sq);
      });
  m.def(
      "orthonormalize",
      [](const std::string& family, const MultiIndexSet& set, const Points& points, bool allow_rank_deficient) {
        OrthoOptions opts;
        opts.allow_rank_deficient = allow_rank_deficient;
        auto grid = std::make_shared<const DiscreteGrid>(grid_from(points));
        return std::const_pointer_cast<OrthoBasis>(orthonormalize_on_grid(dictionary(family, set), grid, opts));
      },
      py::arg("family"), py::arg("index_set"), py::arg("points"), py::arg("allow_rank_deficient") = false);

  py::class_<SamplingPlan>(m, "SamplingPlan")
      .def_property_readonly("scheme", [](const SamplingPlan& p) { return to_string(p.scheme); })
      .def_readonly("probs", &SamplingPlan::probs)
      .def_readonly("weights", &SamplingPlan::weights);
  m.def("monte_carlo_plan", &monte_carlo_plan, py::arg("k"));
  m.def("ls_optimal_plan", &ls_optimal_plan, py::arg("q"));
  m.def("cs_optimal_plan", &cs_optimal_plan, py::arg("b"));
  m.def(
      "preconditioned_plan", [](const Points& points) { return preconditioned_plan(grid_from(points)); },
      py::arg("points"));
  m.def(
      "draw",
      [](const SamplingPlan& plan, const Points& points, std::size_t count, std::uint64_t seed) {
        Rng rng(StreamId{seed, StreamPurpose::Samples, 0, 0});
        const SampleSet s = draw(plan, grid_from(points), count, rng);
        return py::make_tuple(s.point_ids, s.weights);
      },
      py::arg("plan"), py::arg("points"), py::arg("m"), py::arg("seed") = 0,
      "Returns (grid row ids, weights) of m i.i.d. draws.");
  m.def(
      "constants",
      [](const ComplexMatrix& b, const ComplexMatrix& q, const RealVector& w) {
        const auto c = constants_report(b, q, w);
        return py::dict(py::arg("theta_sq") = c.theta_sq, py::arg("Theta_sq") = c.Theta_sq,
                        py::arg("nikolskii_sq") = c.nikolskii_sq, py::arg("riesz_a") = c.riesz_a,
                        py::arg("riesz_b") = c.riesz_b);
      },
      py::arg("b"), py::arg("q"), py::arg("plan_weights"));

  m.def(
      "assemble_ls",
      [](const ComplexMatrix& rows, const RealVector& w, const ComplexMatrix& values) {
        const auto sys = assemble_ls_rows(rows, w, values);
        return py::make_tuple(sys.a, sys.v);
      },
      py::arg("rows"), py::arg("weights"), py::arg("values"),
      "(A, V) with rows scaled by sqrt(w_i / m).");
  m.def(
      "fit_ls",
      [](const ComplexMatrix& a, const ComplexMatrix& v, const std::string& solver) {
        return fit_dict(solve_ls(a, v, parse_ls_solver(solver)));
      },
      py::arg("a"), py::arg("v"), py::arg("solver") = "qr");

  m.def("default_lambda", &default_lambda, py::arg("s"), py::arg("a") = 1.0);
  m.def(
      "sr_lasso",
      [](const ComplexMatrix& a, const ComplexMatrix& v, double lambda, std::optional<RealVector> weights,
         int max_iters, double tol) {
        SrLassoProblem p;
        p.a = a;
        p.v = v;
        p.lambda = lambda;
        if (weights) p.weights = *weights;
        p.options.max_iters = max_iters;
        p.options.tolerance = tol;
        const RecoveryResult r = sr_lasso(p);
        py::dict d;
        d["coefficients"] = r.coefficients;
        d["objective"] = r.objective;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["residual_norm"] = r.residual_norm;
        return d;
      },
      py::arg("a"), py::arg("v"), py::arg("lam"), py::arg("weights") = py::none(), py::arg("max_iters") = 4000,
      py::arg("tol") = 1e-8);
  m.def("lower_set_weights", &lower_set_weights, py::arg("raw_values"), py::arg("grid_weights"));

  m.def(
      "_run_experiment",
      [](const std::string& config_json) {
        const ExperimentResult r = run_experiment(config_from_json(nlohmann::json::parse(config_json)));
        return py::make_tuple(records_to_csv(r.records), r.meta.dump());
      },
      py::arg("config_json"));
}
