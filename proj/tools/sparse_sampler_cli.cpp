// sparse-sampler: command-line front end.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "sparse_sampler/basis.hpp"
#include "sparse_sampler/domain.hpp"
#include "sparse_sampler/experiment.hpp"
#include "sparse_sampler/index_sets.hpp"
#include "sparse_sampler/least_squares.hpp"
#include "sparse_sampler/ortho.hpp"
#include "sparse_sampler/rng.hpp"
#include "sparse_sampler/sampling.hpp"
#include "sparse_sampler/sparse_recovery.hpp"

namespace ss = sparse_sampler;
using nlohmann::json;

namespace {

struct FitOptions {
  std::string basis = "legendre";
  std::string indexset;
  std::string domain;
  std::string scheme = "mc";
  std::string function = "f1";
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
  std::string dump_matrix;
  std::string out;
  std::string diagnostics;
};

// "family:d:order" (e.g. hc:2:10) or a path to an index-set file.
ss::MultiIndexSet resolve_index_set(const std::string& text, ss::BasisFamily basis) {
  ss::MultiIndexSet set = [&] {
    if (std::filesystem::exists(text)) return ss::load_index_set(text);
    const auto a = text.find(':');
    const auto b = text.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos)
      throw ss::FormatError("--indexset expects a file or family:d:order, got '" + text + "'");
    const auto family = ss::parse_family(text.substr(0, a));
    const auto d = static_cast<std::size_t>(std::stoul(text.substr(a + 1, b - a - 1)));
    const int order = std::stoi(text.substr(b + 1));
    return ss::gen_index_set(family, d, order);
  }();
  if (basis == ss::BasisFamily::TensorFourier && !set.signed_entries())
    set = ss::reorder(ss::signed_variant(set), ss::Ordering::TotalDegree);
  return set;
}

void add_fit_flags(CLI::App* app, FitOptions& o) {
  app->add_option("--basis", o.basis, "legendre | fourier | orthogonalized")->capture_default_str();
  app->add_option("--indexset", o.indexset, "index-set file or family:d:order (tp|td|hc)")->required();
  app->add_option("--domain", o.domain, "D1 | D2 | D3 | torus (default D1, torus for Fourier)");
  app->add_option("--function", o.function, "f1 | f2 | f3 | f4")->capture_default_str();
  app->add_option("--m", o.m, "number of samples")->required();
  app->add_option("--seed", o.seed, "master seed")->capture_default_str();
  app->add_option("--grid-size", o.grid_size, "grid points k (default 30 s for LS, 10 n for l1)");
  app->add_option("--dump-matrix", o.dump_matrix, "write the weighted design matrix (binary)");
  app->add_option("--out", o.out, "coefficient file (binary)");
  app->add_option("--diagnostics", o.diagnostics, "diagnostics JSON file (default stdout)");
}

struct Setup {
  ss::BasisFamily basis;
  ss::DictionarySpec source;
  std::shared_ptr<const ss::DiscreteGrid> grid;
  ss::ComplexMatrix raw;  // k x n, 1/sqrt(k) scaling
  std::optional<ss::OrthoBasis> ortho;
};

Setup make_setup(const FitOptions& o, std::size_t default_factor, bool require_full_rank) {
  const auto basis = ss::parse_basis_family(o.basis);
  ss::MultiIndexSet set = resolve_index_set(o.indexset, basis);
  const std::string domain_text = o.domain.empty() ? (basis == ss::BasisFamily::TensorFourier ? "torus" : "D1") : o.domain;
  const ss::Domain domain = ss::parse_domain(domain_text, set.dimension());
  ss::DictionarySpec source = basis == ss::BasisFamily::TensorFourier ? ss::DictionarySpec::fourier(set)
                                                                       : ss::DictionarySpec::legendre(set);
  const std::size_t k = o.grid_size > 0 ? o.grid_size : default_factor * set.size();
  auto grid = std::make_shared<const ss::DiscreteGrid>(
      ss::mc_grid(domain, k, ss::StreamId{o.seed, ss::StreamPurpose::Grid, 0, 0}));
  ss::ComplexMatrix raw = ss::assemble_eval_matrix(source, grid->points, ss::Scaling::OneOverSqrtK).values;
  Setup setup{basis, source, grid, raw, std::nullopt};
  ss::OrthoOptions opts;
  opts.allow_rank_deficient = !require_full_rank;
  try {
    setup.ortho = ss::orthonormalize(raw, source, grid, opts);
  } catch (const ss::NumericalError&) {
    if (require_full_rank || basis == ss::BasisFamily::GridOrthogonalized) throw;
  }
  return setup;
}

// Grid dictionary values (k x n): the source functions or the orthonormalized ones.
ss::ComplexMatrix dictionary_values(const Setup& s) {
  const double sqrt_k = std::sqrt(static_cast<double>(s.grid->size()));
  return s.basis == ss::BasisFamily::GridOrthogonalized ? ss::ComplexMatrix(sqrt_k * s.ortho->q())
                                                        : ss::ComplexMatrix(sqrt_k * s.raw);
}

ss::ComplexMatrix target_values(const std::string& function, const ss::DiscreteGrid& grid) {
  const auto id = ss::parse_test_function(function);
  ss::ComplexMatrix f(static_cast<Eigen::Index>(grid.size()), 1);
  for (std::size_t i = 0; i < grid.size(); ++i)
    f(static_cast<Eigen::Index>(i), 0) = ss::eval_test_function(id, grid.point(i));
  return f;
}

ss::ComplexMatrix rows_of(const ss::ComplexMatrix& values, const std::vector<std::size_t>& ids) {
  ss::ComplexMatrix out(static_cast<Eigen::Index>(ids.size()), values.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(ids[i]));
  return out;
}

ss::SamplingPlan plan_for(ss::Scheme scheme, const Setup& s) {
  switch (scheme) {
    case ss::Scheme::MonteCarlo:
      return ss::monte_carlo_plan(s.grid->size());
    case ss::Scheme::LSOptimalNonhier:
    case ss::Scheme::LSOptimalHier:
      if (!s.ortho) throw ss::NumericalError("optimal LS plan needs a full-rank grid QR");
      return ss::ls_optimal_plan(s.ortho->q());
    case ss::Scheme::CSOptimal:
      return ss::cs_optimal_plan(s.basis == ss::BasisFamily::GridOrthogonalized ? s.ortho->q() : s.raw);
    case ss::Scheme::Preconditioned:
      return ss::preconditioned_plan(*s.grid);
  }
  throw ss::DomainError("unknown scheme");
}

ss::SampleSet draw_samples(ss::Scheme scheme, const Setup& s, std::size_t m, std::uint64_t seed) {
  if (scheme == ss::Scheme::LSOptimalHier) {
    if (!s.ortho) throw ss::NumericalError("hierarchical sampling needs a full-rank grid QR");
    ss::HierarchicalSampler sampler(*s.grid, ss::StreamId{seed, ss::StreamPurpose::Hierarchical, 0, 0});
    return sampler.draw(s.ortho->q(), m);
  }
  ss::Rng rng(ss::StreamId{seed, ss::StreamPurpose::Samples, 0, 0});
  return ss::draw(plan_for(scheme, s), *s.grid, m, rng);
}

void emit_json(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ss::FormatError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

int run_fit_ls(const FitOptions& o) {
  const auto scheme = ss::parse_scheme(o.scheme);
  if (scheme == ss::Scheme::CSOptimal) throw ss::DomainError("fit-ls supports mc, opt-nonhier, opt-hier and precond");
  const Setup s = make_setup(o, 30, true);
  const ss::ComplexMatrix dict = dictionary_values(s);
  const ss::ComplexMatrix f = target_values(o.function, *s.grid);
  const ss::SampleSet samples = draw_samples(scheme, s, o.m, o.seed);
  const ss::LsSystem sys = ss::assemble_ls_rows(rows_of(dict, samples.point_ids), samples.weights,
                                                rows_of(f, samples.point_ids));
  const bool ortho = s.basis == ss::BasisFamily::GridOrthogonalized;
  const ss::FitResult fit =
      ss::solve_ls(sys.a, sys.v, ss::LsSolver::ThinQR, ortho ? std::nullopt : std::optional<ss::ComplexMatrix>(s.ortho->r()));
  if (!o.dump_matrix.empty()) ss::write_matrix_binary(o.dump_matrix, sys.a, ss::Scaling::SqrtWOverSqrtM);
  if (!o.out.empty()) ss::write_matrix_binary(o.out, fit.coefficients, ss::Scaling::Raw);
  json diag{{"alpha_hat", fit.alpha_hat},
            {"beta_hat", fit.beta_hat},
            {"cond_bound", fit.cond_bound},
            {"residual_norm", fit.residual_norm},
            {"rel_err", ss::relative_linf_error(f, dict * fit.coefficients)},
            {"solver", ss::to_string(fit.solver)},
            {"rank_deficient", fit.rank_deficient},
            {"m", o.m},
            {"s", s.source.size()},
            {"k", s.grid->size()}};
  emit_json(diag, o.diagnostics);
  return 0;
}

int run_fit_l1(const FitOptions& o, std::optional<double> lambda, const std::string& weight_mode, int max_iters,
               double tol) {
  const auto scheme = ss::parse_scheme(o.scheme);
  if (scheme == ss::Scheme::LSOptimalNonhier || scheme == ss::Scheme::LSOptimalHier)
    throw ss::DomainError("fit-l1 supports mc, cs-opt and precond");
  if (weight_mode != "none" && weight_mode != "lower") throw ss::FormatError("--weights expects none or lower");
  const Setup s = make_setup(o, 10, false);
  const ss::ComplexMatrix dict = dictionary_values(s);
  const ss::ComplexMatrix f = target_values(o.function, *s.grid);
  const ss::SamplingPlan plan = plan_for(scheme, s);
  ss::Rng rng(ss::StreamId{o.seed, ss::StreamPurpose::Samples, 0, 0});
  const ss::SampleSet samples = ss::draw(plan, *s.grid, o.m, rng);
  const ss::LsSystem sys = ss::assemble_ls_rows(rows_of(dict, samples.point_ids), samples.weights,
                                                rows_of(f, samples.point_ids));
  const double n = static_cast<double>(s.source.size());
  ss::SrLassoProblem problem;
  problem.a = sys.a;
  problem.v = sys.v;
  problem.lambda = lambda ? *lambda : ss::default_lambda(std::max(1.0, static_cast<double>(o.m) / std::log(std::max(n, 2.0))));
  if (weight_mode == "lower") problem.weights = ss::lower_set_weights(dict, plan.weights);
  problem.options.max_iters = max_iters;
  problem.options.tolerance = tol;
  const ss::RecoveryResult fit = ss::sr_lasso(problem);
  if (!o.dump_matrix.empty()) ss::write_matrix_binary(o.dump_matrix, sys.a, ss::Scaling::SqrtWOverSqrtM);
  if (!o.out.empty()) ss::write_matrix_binary(o.out, fit.coefficients, ss::Scaling::Raw);
  json diag{{"objective", fit.objective},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"residual_norm", fit.residual_norm},
            {"lambda", problem.lambda},
            {"weights", weight_mode},
            {"rel_err", ss::relative_linf_error(f, dict * fit.coefficients)},
            {"m", o.m},
            {"n", s.source.size()},
            {"k", s.grid->size()}};
  emit_json(diag, o.diagnostics);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling, least-squares and sparse polynomial approximation on irregular domains"};
  app.require_subcommand(1);

  // indexset
  auto* indexset = app.add_subcommand("indexset", "generate a multi-index set");
  std::string is_family = "hc", is_ordering = "total_degree", is_out;
  std::size_t is_d = 1;
  int is_order = 1;
  bool is_signed = false, is_count = false;
  indexset->add_option("--family", is_family, "tp | td | hc")->capture_default_str();
  indexset->add_option("--d", is_d, "dimension")->required();
  indexset->add_option("--order", is_order, "order t")->required();
  indexset->add_option("--ordering", is_ordering, "lex | total_degree | max_degree")->capture_default_str();
  indexset->add_flag("--signed", is_signed, "all sign patterns (Fourier indices)");
  indexset->add_flag("--count", is_count, "print only the cardinality");
  indexset->add_option("--out", is_out, "output file (default stdout)");

  // constants
  auto* constants = app.add_subcommand("constants", "theta, Theta, Nikolskii and Riesz constants on a grid");
  FitOptions c_opts;
  c_opts.m = 1;
  c_opts.scheme = "opt-nonhier";
  constants->add_option("--basis", c_opts.basis, "legendre | fourier | orthogonalized")->capture_default_str();
  constants->add_option("--indexset", c_opts.indexset, "index-set file or family:d:order")->required();
  constants->add_option("--domain", c_opts.domain, "D1 | D2 | D3 | torus");
  constants->add_option("--scheme", c_opts.scheme, "plan whose weights enter the Nikolskii constant")
      ->capture_default_str();
  constants->add_option("--seed", c_opts.seed, "grid seed")->capture_default_str();
  constants->add_option("--grid-size", c_opts.grid_size, "grid points k (default 10 n)");
  constants->add_option("--dump-matrix", c_opts.dump_matrix, "write the grid dictionary matrix (binary)");

  // fit-ls
  auto* fit_ls = app.add_subcommand("fit-ls", "weighted least-squares fit");
  FitOptions ls_opts;
  add_fit_flags(fit_ls, ls_opts);
  fit_ls->add_option("--scheme", ls_opts.scheme, "mc | opt-nonhier | opt-hier | precond")->capture_default_str();

  // fit-l1
  auto* fit_l1 = app.add_subcommand("fit-l1", "(weighted) SR-LASSO fit");
  FitOptions l1_opts;
  add_fit_flags(fit_l1, l1_opts);
  fit_l1->add_option("--scheme", l1_opts.scheme, "mc | cs-opt | precond")->capture_default_str();
  std::optional<double> l1_lambda;
  std::string l1_weights = "none";
  int l1_iters = 4000;
  double l1_tol = 1e-8;
  fit_l1->add_option("--lambda", l1_lambda, "regularization (default from m and n)");
  fit_l1->add_option("--weights", l1_weights, "none | lower")->capture_default_str();
  fit_l1->add_option("--max-iters", l1_iters, "primal-dual iteration cap")->capture_default_str();
  fit_l1->add_option("--tol", l1_tol, "stopping tolerance")->capture_default_str();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a JSON-configured experiment");
  std::string config_path, out_dir = ".", run_id;
  bool timing = false;
  experiment->add_option("--config", config_path, "experiment config (JSON)")->required();
  experiment->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  experiment->add_option("--run-id", run_id, "override the config run_id");
  experiment->add_flag("--timing", timing, "record wall-clock seconds (output no longer reproducible)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*indexset) {
      auto set = ss::gen_index_set(ss::parse_family(is_family), is_d, is_order, ss::parse_ordering(is_ordering));
      if (is_signed) set = ss::reorder(ss::signed_variant(set), set.ordering());
      if (is_count) {
        std::cout << set.size() << '\n';
      } else if (is_out.empty()) {
        ss::write_index_set(std::cout, set);
      } else {
        ss::save_index_set(is_out, set);
      }
      return 0;
    }
    if (*constants) {
      const Setup s = make_setup(c_opts, 10, false);
      if (!s.ortho) throw ss::NumericalError("grid QR failed");
      const ss::ComplexMatrix& b = s.basis == ss::BasisFamily::GridOrthogonalized ? s.ortho->q() : s.raw;
      const ss::SamplingPlan plan = plan_for(ss::parse_scheme(c_opts.scheme), s);
      const ss::ConstantsReport r = ss::constants_report(b, s.ortho->q(), plan.weights);
      if (!c_opts.dump_matrix.empty()) ss::write_matrix_binary(c_opts.dump_matrix, b, ss::Scaling::OneOverSqrtK);
      std::cout << json{{"theta_sq", r.theta_sq},
                        {"Theta_sq", r.Theta_sq},
                        {"nikolskii_sq", r.nikolskii_sq},
                        {"riesz_a", r.riesz_a},
                        {"riesz_b", r.riesz_b}}
                       .dump(2)
                << '\n';
      return 0;
    }
    if (*fit_ls) return run_fit_ls(ls_opts);
    if (*fit_l1) return run_fit_l1(l1_opts, l1_lambda, l1_weights, l1_iters, l1_tol);
    if (*experiment) {
      ss::ExperimentConfig config = ss::load_config(config_path);
      if (!run_id.empty()) config.run_id = run_id;
      if (timing) config.timing = true;
      const ss::ExperimentResult result = ss::run_experiment(config);
      ss::write_experiment(result, config.run_id, out_dir);
      std::cerr << "wrote " << (std::filesystem::path(out_dir) / (config.run_id + ".csv")).string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "sparse-sampler: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
