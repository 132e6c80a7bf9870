// Acceptance checks. One PASS/FAIL line per criterion; tolerances are fixed
// below. Usage: acceptance <path-to-sparse-sampler> [--only N ...]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sparse_sampler/experiment.hpp"
#include "sparse_sampler/least_squares.hpp"
#include "sparse_sampler/ortho.hpp"
#include "sparse_sampler/sparse_recovery.hpp"

#include "reference_solver.hpp"

using namespace sparse_sampler;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::shared_ptr<const DiscreteGrid> grid_on(const Domain& dom, std::size_t k, std::uint64_t seed) {
  return std::make_shared<const DiscreteGrid>(mc_grid(dom, k, StreamId{seed, StreamPurpose::Grid, 0, 0}));
}

ComplexMatrix rows_of(const ComplexMatrix& v, const std::vector<std::size_t>& ids) {
  ComplexMatrix out(static_cast<Eigen::Index>(ids.size()), v.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = v.row(static_cast<Eigen::Index>(ids[i]));
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ComplexMatrix gaussian(Eigen::Index r, Eigen::Index c, Rng& rng) {
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(rng.normal(), 0.0);
  return m;
}

std::vector<Eigen::Index> random_support(Eigen::Index n, Eigen::Index s, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// First s indices of a total-degree set in graded order: always a lower set.
MultiIndexSet graded_prefix(std::size_t d, std::size_t s) {
  int t = 0;
  while (gen_total_degree(d, t).size() < s) ++t;
  const MultiIndexSet full = gen_total_degree(d, t);
  std::vector<MultiIndex> head(full.indices().begin(), full.indices().begin() + static_cast<std::ptrdiff_t>(s));
  return MultiIndexSet(d, std::move(head), Ordering::TotalDegree);
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  double worst_q = 0.0, worst_riesz = 0.0;
  std::size_t n_max = 0;
  for (int t : {9, 19, 39, 67}) {
    const auto spec = DictionarySpec::legendre(gen_hyperbolic_cross(2, t));
    const auto grid = grid_on(Domain::annulus(2), 10 * spec.size(), 100 + static_cast<std::uint64_t>(t));
    const auto basis = orthonormalize_on_grid(spec, grid);
    const ComplexMatrix& q = basis->q();
    worst_q = std::max(worst_q, (q.adjoint() * q - ComplexMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff());
    const RieszConstants rc = riesz_constants(q);
    worst_riesz = std::max({worst_riesz, std::abs(rc.a - 1.0), std::abs(rc.b - 1.0)});
    n_max = spec.size();
  }
  return {worst_q <= 1e-8 && worst_riesz <= 1e-10,
          "n_max=" + std::to_string(n_max) + " max|Q*Q-I|=" + fmt("%.2e", worst_q) + " max|riesz-1|=" + fmt("%.2e", worst_riesz)};
}

Outcome criterion_2() {
  double worst_opt = 0.0, worst_lower = std::numeric_limits<double>::infinity();
  int cases = 0;
  for (const char* dom_name : {"D1", "D2", "D3"})
    for (std::size_t d : {2, 3})
      for (IndexFamily fam : {IndexFamily::HyperbolicCross, IndexFamily::TotalDegree, IndexFamily::TensorProduct}) {
        const int t = fam == IndexFamily::HyperbolicCross ? 15 : (fam == IndexFamily::TotalDegree ? 5 : 3);
        const auto spec = DictionarySpec::legendre(gen_index_set(fam, d, t, Ordering::TotalDegree));
        const auto s = static_cast<double>(spec.size());
        const auto grid = grid_on(parse_domain(dom_name, d), 30 * spec.size(), 200 + static_cast<std::uint64_t>(cases));
        const auto basis = orthonormalize_on_grid(spec, grid);
        const RealVector k_fn = christoffel_on_grid(basis->q());
        worst_opt = std::max(worst_opt, std::abs(nikolskii_sq(k_fn, ls_optimal_plan(basis->q()).weights) - s));
        worst_lower = std::min(worst_lower, nikolskii_sq(k_fn, monte_carlo_plan(grid->size()).weights) - s);
        worst_lower = std::min(worst_lower, nikolskii_sq(k_fn, preconditioned_plan(*grid).weights) - s);
        ++cases;
      }
  return {worst_opt <= 1e-10 && worst_lower >= -1e-10,
          std::to_string(cases) + " cases, max|N^2-s| optimal=" + fmt("%.2e", worst_opt) +
              ", min(N^2-s) mc/precond=" + fmt("%.3g", worst_lower)};
}

Outcome criterion_3() {
  const double delta = 0.5, eps = 0.1;
  const double c_delta = 1.0 / ((1.0 - delta) * std::log(1.0 - delta) + delta);
  bool pass = std::abs(c_delta - 6.518) < 1e-3;
  std::string detail = "c_delta=" + fmt("%.4f", c_delta);
  for (std::size_t d : {1, 2})
    for (std::size_t s : {20, 50}) {
      const auto spec = DictionarySpec::legendre(graded_prefix(d, s));
      const auto grid = grid_on(Domain::annulus(d), 30 * s, 300 + d * 100 + s);
      const auto basis = orthonormalize_on_grid(spec, grid);
      const ComplexMatrix up = basis->grid_values();
      const SamplingPlan plan = ls_optimal_plan(basis->q());
      const auto m = static_cast<std::size_t>(std::ceil(c_delta * static_cast<double>(s) * std::log(2.0 * static_cast<double>(s) / eps)));
      int bad = 0;
      for (std::uint64_t trial = 0; trial < 100; ++trial) {
        Rng rng(StreamId{3, StreamPurpose::Samples, trial, d * 1000 + s});
        const SampleSet smp = draw(plan, *grid, m, rng);
        const LsSystem sys = assemble_ls_rows(rows_of(up, smp.point_ids), smp.weights,
                                              ComplexMatrix::Zero(static_cast<Eigen::Index>(m), 1));
        const AlphaBeta ab = estimate_alpha_beta(sys.a);
        if (ab.alpha < 0.5 || ab.beta > 1.5) ++bad;
      }
      pass = pass && bad <= 10;
      detail += " (d=" + std::to_string(d) + ",s=" + std::to_string(s) + ",m=" + std::to_string(m) + "): " +
                std::to_string(bad) + "/100";
    }
  return {pass, detail};
}

Outcome criterion_4() {
  const std::size_t s = 50;
  const auto spec = DictionarySpec::legendre(gen_total_degree(1, 49));
  const auto grid = grid_on(Domain::hypercube(1), 30 * s, 4);
  const auto basis = orthonormalize_on_grid(spec, grid);
  const ComplexMatrix up = basis->grid_values();
  const std::size_t m = slogs_samples(s);
  std::vector<double> mc, opt;
  for (std::uint64_t trial = 0; trial < 100; ++trial)
    for (Scheme scheme : {Scheme::MonteCarlo, Scheme::LSOptimalNonhier}) {
      const SamplingPlan plan = scheme == Scheme::MonteCarlo ? monte_carlo_plan(grid->size()) : ls_optimal_plan(basis->q());
      Rng rng(StreamId{4, StreamPurpose::Samples, trial, static_cast<std::uint64_t>(scheme)});
      const SampleSet smp = draw(plan, *grid, m, rng);
      const LsSystem sys = assemble_ls_rows(rows_of(up, smp.point_ids), smp.weights,
                                            ComplexMatrix::Zero(static_cast<Eigen::Index>(m), 1));
      (scheme == Scheme::MonteCarlo ? mc : opt).push_back(estimate_alpha_beta(sys.a).alpha);
    }
  const double nik_mc = nikolskii_sq(christoffel_on_grid(basis->q()), monte_carlo_plan(grid->size()).weights);
  return {median(mc) < median(opt), "m=" + std::to_string(m) + " median alpha mc=" + fmt("%.4f", median(mc)) +
                                        " opt=" + fmt("%.4f", median(opt)) + " N^2(mc)=" + fmt("%.1f", nik_mc) +
                                        " (s^2=2500)"};
}

Outcome criterion_5() {
  ExperimentConfig c;
  c.function = TestFunctionId::InSpan;
  c.outputs = 3;
  c.dimension = 2;
  c.domain = "D2";
  c.orders = {19};
  c.schemes = {Scheme::MonteCarlo, Scheme::LSOptimalNonhier, Scheme::LSOptimalHier, Scheme::Preconditioned};
  c.trials = 25;
  c.seed = 5;
  const auto r = run_experiment(c);
  double worst = 0.0;
  int full_rank = 0;
  for (const auto& rec : r.records) {
    if (!(rec.alpha_hat > 1e-10)) continue;
    ++full_rank;
    worst = std::max(worst, std::isnan(rec.rel_err) ? 1.0 : rec.rel_err);
  }
  return {full_rank > 0 && worst <= 1e-9, std::to_string(full_rank) + "/" + std::to_string(r.records.size()) +
                                              " full-rank draws, max rel err=" + fmt("%.2e", worst)};
}

Outcome criterion_6() {
  double worst = 0.0;
  int grids = 0;
  for (std::size_t d : {1, 2, 3})
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const int t = d == 1 ? 30 : (d == 2 ? 10 : 4);
      const auto spec = DictionarySpec::fourier(signed_variant(gen_hyperbolic_cross(d, t)));
      const DiscreteGrid grid = seed == 4 ? equispaced_torus_grid(d, d == 3 ? 8 : 16)
                                          : mc_grid(Domain::torus(d), 10 * spec.size(), StreamId{seed, StreamPurpose::Grid, d, 0});
      const ComplexMatrix b = assemble_eval_matrix(spec, grid.points, Scaling::OneOverSqrtK).values;
      const OrthoConstants oc = ortho_constants(b);
      const SamplingPlan plan = cs_optimal_plan(b);
      worst = std::max({worst, std::abs(oc.theta_sq - 1.0), std::abs(oc.Theta_sq - 1.0),
                        (plan.weights.array() - 1.0).abs().maxCoeff()});
      ++grids;
    }
  return {worst <= 1e-12, std::to_string(grids) + " grids, max deviation from 1: " + fmt("%.2e", worst)};
}

// Continuous theta^2 = int max_iota |phi_iota|^2 d rho on [-1,1]^d, after
// y_k = cos(pi u_k): the integrand becomes prod (pi/2) sin(pi u_k) max|phi|^2,
// bounded on [0,1]^d. Midpoint rule for d <= 2, Monte Carlo in u otherwise.
double continuous_theta_sq(const DictionarySpec& spec, std::uint64_t seed) {
  const std::size_t d = spec.index_set.dimension();
  const std::size_t per_dim = d == 1 ? 20000 : 300;
  const std::size_t total = d <= 2 ? (d == 1 ? per_dim : per_dim * per_dim) : 40000;
  Rng rng(StreamId{seed, StreamPurpose::Grid, 7, 0});
  const std::size_t chunk = 4000;
  double sum = 0.0;
  for (std::size_t start = 0; start < total; start += chunk) {
    const std::size_t rows = std::min(chunk, total - start);
    Points pts(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    RealVector jac(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      double j = 1.0;
      std::size_t idx = start + r;
      for (std::size_t c = 0; c < d; ++c) {
        double u;
        if (d <= 2) {
          u = (static_cast<double>(idx % per_dim) + 0.5) / static_cast<double>(per_dim);
          idx /= per_dim;
        } else {
          u = rng.uniform();
        }
        pts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::cos(std::numbers::pi * u);
        j *= std::numbers::pi / 2 * std::sin(std::numbers::pi * u);
      }
      jac(static_cast<Eigen::Index>(r)) = j;
    }
    const Eigen::MatrixXd mag = assemble_eval_matrix(spec, pts).values.cwiseAbs2();
    sum += (mag.rowwise().maxCoeff().array() * jac.array()).sum();
  }
  return sum / static_cast<double>(total);
}

Outcome criterion_7() {
  bool pass = true;
  double worst_cont = 0.0, worst_grid = 0.0;
  const std::map<std::size_t, std::vector<std::pair<IndexFamily, int>>> sets = {
      {1, {{IndexFamily::TensorProduct, 10}, {IndexFamily::TotalDegree, 50}, {IndexFamily::HyperbolicCross, 200}}},
      {2, {{IndexFamily::TensorProduct, 10}, {IndexFamily::TotalDegree, 20}, {IndexFamily::HyperbolicCross, 60}}},
      {4, {{IndexFamily::TensorProduct, 3}, {IndexFamily::TotalDegree, 6}, {IndexFamily::HyperbolicCross, 20}}},
      {8, {{IndexFamily::TensorProduct, 1}, {IndexFamily::TotalDegree, 3}, {IndexFamily::HyperbolicCross, 10}}}};
  for (const auto& [d, list] : sets)
    for (const auto& [fam, t] : list) {
      const auto spec = DictionarySpec::legendre(gen_index_set(fam, d, t, Ordering::TotalDegree));
      const double bound = std::pow(2.0, static_cast<double>(d));
      const double cont = continuous_theta_sq(spec, 700 + d);
      worst_cont = std::max(worst_cont, cont / bound);
      pass = pass && cont < bound;
      // Discrete grid version (k = 10n), reported only.
      const auto grid = grid_on(Domain::hypercube(d), 10 * spec.size(), 700 + d * 10 + static_cast<std::uint64_t>(fam));
      const ComplexMatrix b = assemble_eval_matrix(spec, grid->points, Scaling::OneOverSqrtK).values;
      worst_grid = std::max(worst_grid, ortho_constants(b).theta_sq / bound);
    }
  std::string detail = "max theta^2/2^d continuous=" + fmt("%.4f", worst_cont) + " (grid k=10n: " + fmt("%.4f", worst_grid) + ")";
  // Theta^2 closed form for TP(s), checked against direct evaluation at the corner.
  double worst_tp = 0.0;
  for (std::size_t d : {1, 2, 4, 8})
    for (int s : {1, 2, 3}) {
      const MultiIndexSet tp = gen_tensor_product(d, s);
      const double closed = std::pow(2.0 * s + 1.0, static_cast<double>(d));
      const std::vector<double> corner(d, 1.0);
      const ComplexVector at_corner = eval_dictionary(DictionarySpec::legendre(tp), corner);
      const double direct = at_corner.cwiseAbs2().maxCoeff();
      worst_tp = std::max({worst_tp, std::abs(legendre_Theta_sq(tp) - closed) / closed, std::abs(direct - closed) / closed});
    }
  pass = pass && worst_tp <= 1e-12;
  detail += ", TP closed-form rel dev=" + fmt("%.1e", worst_tp);
  return {pass, detail};
}

Outcome criterion_8() {
  // d = 1, D2, n = 400 (t = 399), k = 10n, averaged over 10 grid seeds.
  const auto spec = DictionarySpec::legendre(gen_hyperbolic_cross(1, 399));
  double tl = 0, Tl = 0, tq = 0, Tq = 0;
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto grid = grid_on(Domain::annulus(1), 10 * spec.size(), 800 + static_cast<std::uint64_t>(seed));
    const ComplexMatrix b = assemble_eval_matrix(spec, grid->points, Scaling::OneOverSqrtK).values;
    const OrthoConstants l = ortho_constants(b);
    OrthoOptions lenient;
    lenient.allow_rank_deficient = true;
    const OrthoConstants q = ortho_constants(orthonormalize(b, spec, grid, lenient));
    tl += l.theta_sq / seeds;
    Tl += l.Theta_sq / seeds;
    tq += q.theta_sq / seeds;
    Tq += q.Theta_sq / seeds;
  }
  auto within = [](double v, double ref, double rel) { return std::abs(v - ref) <= rel * ref; };
  auto factor2 = [](double v, double ref) { return v >= ref / 2 && v <= ref * 2; };
  const bool pass = within(tl, 2.25, 0.25) && within(Tl, 303.73, 0.25) && factor2(tq, 5.19) && factor2(Tq, 768.17);
  return {pass, "mean over seeds: theta_L^2=" + fmt("%.2f", tl) + " Theta_L^2=" + fmt("%.2f", Tl) +
                    " theta_Q^2=" + fmt("%.2f", tq) + " Theta_Q^2=" + fmt("%.2f", Tq) +
                    " (targets 2.25, 303.73, 5.19, 768.17)"};
}

Outcome criterion_9() {
  double worst = 0.0;
  int nontrivial = 0;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    Rng rng(StreamId{9, StreamPurpose::Problem, inst, 0});
    const ComplexMatrix a = gaussian(20, 50, rng) / std::sqrt(20.0);
    ComplexMatrix z = ComplexMatrix::Zero(50, 1);
    for (Eigen::Index j : random_support(50, 3, rng)) z(j, 0) = rng.normal();
    const ComplexMatrix v = a * z + 0.01 * gaussian(20, 1, rng);
    SrLassoProblem p;
    p.a = a;
    p.v = v;
    p.lambda = default_lambda(3.0);
    p.options.max_iters = 20000;
    p.options.tolerance = 1e-10;
    const auto r = sr_lasso(p);
    const double ref = reference::sr_lasso_objective(a, v, p.lambda, RealVector::Ones(50));
    worst = std::max(worst, std::abs(r.objective - ref));
    if (r.coefficients.norm() > 0.0) ++nontrivial;
  }
  int exact = 0;
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    Rng rng(StreamId{9, StreamPurpose::Problem, inst, 1});
    const ComplexMatrix a = gaussian(60, 128, rng) / std::sqrt(60.0);
    const auto support = random_support(128, 4, rng);
    ComplexMatrix z = ComplexMatrix::Zero(128, 3);
    for (Eigen::Index j : support)
      for (Eigen::Index c = 0; c < 3; ++c) z(j, c) = rng.normal();
    SrLassoProblem p;
    p.a = a;
    p.v = a * z;
    p.lambda = default_lambda(4.0);
    p.options.max_iters = 8000;
    p.options.tolerance = 1e-10;
    const RecoveryResult r = sr_lasso(p);
    const double scale = r.coefficients.norm();
    std::vector<Eigen::Index> found;
    for (Eigen::Index j = 0; j < 128; ++j)
      if (r.coefficients.row(j).norm() > 1e-4 * scale) found.push_back(j);
    if (found == support) ++exact;
  }
  return {worst <= 1e-4 && exact >= 95,
          "max objective gap=" + fmt("%.2e", worst) + " (" + std::to_string(nontrivial) +
              "/20 nonzero minimizers), block support exact " + std::to_string(exact) + "/100"};
}

ExperimentConfig l1_config(SolverKind solver) {
  ExperimentConfig c;
  c.function = TestFunctionId::F1;
  c.dimension = 2;
  c.solver = solver;
  c.m_rule = MRule::Explicit;
  c.trials = 20;
  c.max_iters = 3000;
  return c;
}

std::map<std::pair<Scheme, std::size_t>, double> log_means(const ExperimentResult& r) {
  std::map<std::pair<Scheme, std::size_t>, std::vector<double>> errs;
  for (const auto& rec : r.records) errs[{rec.scheme, rec.m}].push_back(std::isnan(rec.rel_err) ? 1.0 : rec.rel_err);
  std::map<std::pair<Scheme, std::size_t>, double> out;
  for (const auto& [key, e] : errs) out[key] = log_stats(e).log_mean;
  return out;
}

Outcome criterion_10() {
  std::map<SolverKind, double> err;
  std::size_t m_top = 0;
  for (SolverKind solver : {SolverKind::L1, SolverKind::L1Weighted}) {
    ExperimentConfig c = l1_config(solver);
    c.domain = "D2";
    c.basis = BasisFamily::GridOrthogonalized;
    c.orders = {67};
    c.schemes = {Scheme::CSOptimal};
    c.m_values = {10, 20, 30, 40, 50, 60};
    // Noise-free target: both variants share a small lambda (near basis pursuit).
    c.lambda = 1e-3;
    c.max_iters = 10000;
    c.tolerance = 1e-10;
    c.seed = 10;
    m_top = c.m_values.back();
    err[solver] = log_means(run_experiment(c))[{Scheme::CSOptimal, m_top}];
  }
  return {err[SolverKind::L1Weighted] <= err[SolverKind::L1],
          "m=" + std::to_string(m_top) + " log-mean weighted=" + fmt("%.3e", err[SolverKind::L1Weighted]) +
              " unweighted=" + fmt("%.3e", err[SolverKind::L1])};
}

Outcome criterion_11() {
  ExperimentConfig c = l1_config(SolverKind::L1);
  c.domain = "D1";
  c.basis = BasisFamily::TensorLegendre;
  c.orders = {29};
  c.schemes = {Scheme::MonteCarlo, Scheme::CSOptimal};
  c.m_values = {20, 35, 50, 65, 80, 95};
  c.seed = 11;
  const auto lm = log_means(run_experiment(c));
  bool pass = true;
  std::string detail;
  for (std::size_t m : {c.m_values[4], c.m_values[5]}) {
    const double mc = lm.at({Scheme::MonteCarlo, m}), cs = lm.at({Scheme::CSOptimal, m});
    pass = pass && cs <= mc;
    detail += "m=" + std::to_string(m) + " cs-opt=" + fmt("%.3e", cs) + " mc=" + fmt("%.3e", mc) + "; ";
  }
  return {pass, detail};
}

Outcome criterion_12() {
  int mismatches = 0, checked = 0;
  for (std::size_t d = 1; d <= 3; ++d)
    for (int t = 0; t <= 30; ++t) {
      std::size_t hc = 0, td = 0, tp = 0;
      std::vector<int> nu(d, 0);
      for (;;) {
        long prod = 1, sum = 0;
        for (int v : nu) {
          prod *= v + 1;
          sum += v;
        }
        ++tp;
        td += sum <= t;
        hc += prod <= t + 1;
        std::size_t pos = 0;
        while (pos < d && ++nu[pos] > t) nu[pos++] = 0;
        if (pos == d) break;
      }
      mismatches += gen_hyperbolic_cross(d, t).size() != hc;
      mismatches += gen_total_degree(d, t).size() != td;
      mismatches += gen_tensor_product(d, t).size() != tp;
      checked += 3;
    }
  int union_bad = 0, union_checked = 0;
  for (std::size_t d = 1; d <= 3; ++d)
    for (std::size_t s = 1; s <= 8; ++s) {
      std::set<MultiIndex> all;
      for (const auto& lower : enumerate_lower_sets(d, s))
        for (const auto& nu : lower) all.insert(nu);
      const MultiIndexSet hc = gen_hyperbolic_cross(d, static_cast<int>(s) - 1);
      const std::set<MultiIndex> want(hc.indices().begin(), hc.indices().end());
      union_bad += all != want;
      ++union_checked;
    }
  return {mismatches == 0 && union_bad == 0, std::to_string(checked - mismatches) + "/" + std::to_string(checked) +
                                                 " cardinalities, " + std::to_string(union_checked - union_bad) + "/" +
                                                 std::to_string(union_checked) + " lower-set unions"};
}

Outcome criterion_13(const std::string& cli) {
  if (cli.empty() || !fs::exists(cli)) return {false, "CLI binary not found: '" + cli + "'"};
  const fs::path dir = fs::temp_directory_path() / "sparse_sampler_acceptance_13";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<nlohmann::json> configs = {
      {{"function", "f1"}, {"dimension", 2}, {"domain", "D2"}, {"orders", {4, 9, 14}},
       {"schemes", {"mc", "opt-nonhier", "opt-hier", "precond"}}, {"trials", 3}, {"seed", 13}},
      {{"function", "f2"}, {"dimension", 2}, {"domain", "D3"}, {"orders", {9}}, {"basis", "ortho"},
       {"solver", "l1-weighted"}, {"schemes", {"mc", "cs-opt"}}, {"m_values", {20, 30}}, {"trials", 2},
       {"max_iters", 500}, {"seed", 13}}};
  std::string detail;
  bool pass = true;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const fs::path cfg = dir / ("config" + std::to_string(i) + ".json");
    std::ofstream(cfg) << configs[i].dump(2);
    std::vector<std::string> bytes;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / ("run" + std::to_string(i) + "_" + std::to_string(run));
      fs::create_directories(out);
      const std::string cmd = "\"" + cli + "\" experiment --config \"" + cfg.string() + "\" --out-dir \"" +
                              out.string() + "\" --run-id det > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "CLI failed: " + cmd};
      std::ifstream in(out / "det.csv", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      bytes.push_back(ss.str());
    }
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
    pass = pass && same;
    detail += "config " + std::to_string(i) + (same ? " identical" : " DIFFERS") + " (" + std::to_string(bytes[0].size()) + " bytes); ";
  }
  fs::remove_all(dir);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string cli;
  std::vector<int> only;
  app.add_option("cli", cli, "path to the sparse-sampler executable");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"orthonormality and Riesz constants", criterion_1},
      {"optimal Nikolskii identity and lower bound", criterion_2},
      {"weighted LS sample complexity", criterion_3},
      {"Monte Carlo vs optimal alpha at m = s log s", criterion_4},
      {"exact in-span recovery, K = 3", criterion_5},
      {"Fourier constants and unit weights", criterion_6},
      {"Legendre theta^2 < 2^d and TP Theta^2", criterion_7},
      {"1D annulus constants vs reference values", criterion_8},
      {"SR-LASSO vs reference solver, block support", criterion_9},
      {"weighted vs unweighted l1", criterion_10},
      {"CS-optimal vs Monte Carlo l1", criterion_11},
      {"index-set oracles", criterion_12},
      {"CLI determinism", [&] { return criterion_13(cli); }}};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
