#include "sparse_sampler/experiment.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "sparse_sampler/domain.hpp"
#include "sparse_sampler/least_squares.hpp"
#include "sparse_sampler/ortho.hpp"
#include "sparse_sampler/rng.hpp"
#include "sparse_sampler/sparse_recovery.hpp"

namespace sparse_sampler {

using nlohmann::json;

std::string to_string(TestFunctionId id) {
  switch (id) {
    case TestFunctionId::F1:
      return "f1";
    case TestFunctionId::F2:
      return "f2";
    case TestFunctionId::F3:
      return "f3";
    case TestFunctionId::F4:
      return "f4";
    case TestFunctionId::InSpan:
      return "in_span";
    case TestFunctionId::User:
      return "user";
  }
  return "?";
}

TestFunctionId parse_test_function(const std::string& text) {
  if (text == "f1") return TestFunctionId::F1;
  if (text == "f2") return TestFunctionId::F2;
  if (text == "f3") return TestFunctionId::F3;
  if (text == "f4") return TestFunctionId::F4;
  if (text == "in_span") return TestFunctionId::InSpan;
  if (text == "user") return TestFunctionId::User;
  throw FormatError("unknown test function '" + text + "'");
}

double eval_test_function(TestFunctionId id, std::span<const double> y) {
  const std::size_t d = y.size();
  if (d == 0) throw ShapeError("test function: empty point");
  switch (id) {
    case TestFunctionId::F1: {
      double sum = 0.0;
      for (double v : y) sum += v;
      return std::exp(-sum / static_cast<double>(d));
    }
    case TestFunctionId::F2: {
      // Coordinates are 1-based in the formula.
      const std::size_t half = (d + 1) / 2;
      double num = 1.0;
      for (std::size_t k = half + 1; k <= d; ++k) num *= std::cos(16.0 * y[k - 1] / std::ldexp(1.0, static_cast<int>(k)));
      double den = 1.0;
      for (std::size_t k = 1; k <= half; ++k) den *= 1.0 - y[k - 1] / std::ldexp(1.0, 2 * static_cast<int>(k));
      return num / den;
    }
    case TestFunctionId::F3: {
      const double q = static_cast<double>(d) / 4.0;
      double prod = 1.0;
      for (std::size_t i = 1; i <= d; ++i) {
        const double shift = (i % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(i + 1);
        const double t = y[i - 1] + shift;
        prod *= q / (q + t * t);
      }
      return prod;
    }
    case TestFunctionId::F4: {
      double sum = 0.0;
      for (double v : y) sum += std::sqrt(std::abs(v));
      if (sum == 0.0) throw DomainError("f4 is singular at the origin");
      return 1.0 / sum;
    }
    case TestFunctionId::InSpan:
    case TestFunctionId::User:
      break;
  }
  throw DomainError("eval_test_function: " + to_string(id) + " has no closed form");
}

double relative_linf_error(const ComplexMatrix& f, const ComplexMatrix& fhat) {
  if (f.rows() != fhat.rows() || f.cols() != fhat.cols())
    throw ShapeError("relative_linf_error: shapes differ");
  if (f.rows() == 0) throw ShapeError("relative_linf_error: empty grid");
  const double denom = f.rowwise().norm().maxCoeff();
  if (!(denom > 0.0)) throw NumericalError("relative_linf_error: target vanishes on the grid");
  return (f - fhat).rowwise().norm().maxCoeff() / denom;
}

LogStats log_stats(std::span<const double> errors) {
  if (errors.empty()) throw ShapeError("log_stats: no errors");
  std::vector<double> logs;
  logs.reserve(errors.size());
  for (double e : errors) logs.push_back(std::log(std::max(e, kErrorFloor)));
  double mean = 0.0;
  for (double l : logs) mean += l;
  mean /= static_cast<double>(logs.size());
  double var = 0.0;
  for (double l : logs) var += (l - mean) * (l - mean);
  var /= static_cast<double>(logs.size());
  return {std::exp(mean), std::exp(std::sqrt(var))};
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::LeastSquares:
      return "ls";
    case SolverKind::L1:
      return "l1";
    case SolverKind::L1Weighted:
      return "l1-weighted";
  }
  return "?";
}

SolverKind parse_solver_kind(const std::string& text) {
  if (text == "ls") return SolverKind::LeastSquares;
  if (text == "l1") return SolverKind::L1;
  if (text == "l1-weighted") return SolverKind::L1Weighted;
  throw FormatError("unknown solver '" + text + "' (expected ls, l1 or l1-weighted)");
}

std::size_t slogs_samples(std::size_t s) {
  if (s == 0) throw DomainError("slogs_samples: s must be >= 1");
  if (s == 1) return 1;
  const double target = static_cast<double>(s) * std::log(static_cast<double>(s));
  return static_cast<std::size_t>(std::ceil(target - 1e-12));
}

std::vector<std::size_t> default_cs_ladder(std::size_t n) {
  if (n == 0) throw DomainError("default_cs_ladder: n must be >= 1");
  std::vector<std::size_t> ladder;
  for (int p = 5; p <= 12; ++p) {
    const std::size_t m = std::size_t{1} << p;
    if (m >= n) {
      ladder.push_back(n);
      break;
    }
    ladder.push_back(m);
  }
  return ladder;
}

void ExperimentConfig::validate() const {
  if (dimension < 1) throw DomainError("config: dimension must be >= 1");
  if (trials < 1) throw DomainError("config: trials must be >= 1");
  if (orders.empty()) throw DomainError("config: the order ladder is empty");
  for (int t : orders)
    if (t < 0) throw DomainError("config: orders must be nonnegative");
  if (schemes.empty()) throw DomainError("config: no sampling schemes");
  if (outputs < 1) throw DomainError("config: outputs must be >= 1");
  if (outputs > 1 && function != TestFunctionId::InSpan)
    throw DomainError("config: outputs > 1 requires the in_span target");
  if (function == TestFunctionId::User && !user_function)
    throw DomainError("config: user function requested without a callback");
  if (!(noise_sigma >= 0.0)) throw DomainError("config: noise_sigma must be >= 0");
  if (lambda && !(*lambda > 0.0)) throw DomainError("config: lambda must be positive");
  if (grid_size && *grid_size < 1) throw DomainError("config: grid_size must be >= 1");
  if (m_rule == MRule::Explicit) {
    if (m_values.empty()) throw DomainError("config: explicit m rule needs m_values");
    for (auto m : m_values)
      if (m < 1) throw DomainError("config: m values must be >= 1");
    if (solver == SolverKind::LeastSquares && m_values.size() != 1 && m_values.size() != orders.size())
      throw DomainError("config: m_values must have one entry or one per order");
  }
  if (solver != SolverKind::LeastSquares)
    for (Scheme s : schemes)
      if (s == Scheme::LSOptimalNonhier || s == Scheme::LSOptimalHier)
        throw DomainError("config: l1 runs support the mc, cs-opt and precond schemes");
  if (basis == BasisFamily::TensorFourier && domain != "torus")
    throw DomainError("config: the Fourier basis lives on the torus domain");
}

namespace {

const std::vector<std::string> kConfigKeys = {
    "run_id", "function", "dimension", "domain", "basis", "index_family", "ordering", "orders",
    "schemes", "m_rule", "m_values", "trials", "grid_size", "seed", "solver", "lambda",
    "max_iters", "tol", "outputs", "noise_sigma", "timing", "l1_weights"};

L1Weights parse_l1_weights(const std::string& text) {
  if (text == "sup") return L1Weights::Sup;
  if (text == "plan") return L1Weights::Plan;
  throw FormatError("unknown l1_weights '" + text + "' (expected sup or plan)");
}

MRule parse_m_rule(const std::string& text) {
  if (text == "slogs") return MRule::SLogS;
  if (text == "explicit") return MRule::Explicit;
  throw FormatError("unknown m_rule '" + text + "' (expected slogs or explicit)");
}

std::string m_rule_name(MRule rule) { return rule == MRule::SLogS ? "slogs" : "explicit"; }

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("config: expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end())
      throw FormatError("config: unknown key '" + key + "'");
  ExperimentConfig c;
  try {
    if (j.contains("run_id")) c.run_id = j.at("run_id").get<std::string>();
    if (j.contains("function")) c.function = parse_test_function(j.at("function").get<std::string>());
    if (j.contains("dimension")) c.dimension = j.at("dimension").get<std::size_t>();
    if (j.contains("domain")) c.domain = j.at("domain").get<std::string>();
    if (j.contains("basis")) c.basis = parse_basis_family(j.at("basis").get<std::string>());
    if (j.contains("index_family")) c.index_family = parse_family(j.at("index_family").get<std::string>());
    if (j.contains("ordering")) c.ordering = parse_ordering(j.at("ordering").get<std::string>());
    if (j.contains("orders")) c.orders = j.at("orders").get<std::vector<int>>();
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (j.contains("m_rule")) c.m_rule = parse_m_rule(j.at("m_rule").get<std::string>());
    if (j.contains("m_values")) c.m_values = j.at("m_values").get<std::vector<std::size_t>>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("grid_size") && !j.at("grid_size").is_null()) c.grid_size = j.at("grid_size").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("solver")) c.solver = parse_solver_kind(j.at("solver").get<std::string>());
    if (j.contains("lambda") && !j.at("lambda").is_null()) c.lambda = j.at("lambda").get<double>();
    if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
    if (j.contains("tol")) c.tolerance = j.at("tol").get<double>();
    if (j.contains("outputs")) c.outputs = j.at("outputs").get<int>();
    if (j.contains("noise_sigma")) c.noise_sigma = j.at("noise_sigma").get<double>();
    if (j.contains("timing")) c.timing = j.at("timing").get<bool>();
    if (j.contains("l1_weights")) c.l1_weights = parse_l1_weights(j.at("l1_weights").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (c.m_rule == MRule::SLogS && !c.m_values.empty()) c.m_rule = MRule::Explicit;
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["run_id"] = c.run_id;
  j["function"] = to_string(c.function);
  j["dimension"] = c.dimension;
  j["domain"] = c.domain;
  j["basis"] = to_string(c.basis);
  j["index_family"] = to_string(c.index_family);
  j["ordering"] = to_string(c.ordering);
  j["orders"] = c.orders;
  j["schemes"] = json::array();
  for (Scheme s : c.schemes) j["schemes"].push_back(to_string(s));
  j["m_rule"] = m_rule_name(c.m_rule);
  j["m_values"] = c.m_values;
  j["trials"] = c.trials;
  j["grid_size"] = c.grid_size ? json(*c.grid_size) : json(nullptr);
  j["seed"] = c.seed;
  j["solver"] = to_string(c.solver);
  j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  j["max_iters"] = c.max_iters;
  j["tol"] = c.tolerance;
  j["outputs"] = c.outputs;
  j["noise_sigma"] = c.noise_sigma;
  j["timing"] = c.timing;
  j["l1_weights"] = c.l1_weights == L1Weights::Sup ? "sup" : "plan";
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

namespace {

struct Step {
  int order = 0;
  std::size_t s = 0;
  std::size_t m = 0;
};

struct FailureLog {
  json entries = json::array();
  void add(Scheme scheme, std::size_t step, int trial, const std::string& what) {
    entries.push_back({{"scheme", to_string(scheme)}, {"step", step}, {"trial", trial}, {"error", what}});
  }
};

std::uint64_t stream_sub(std::size_t step, std::size_t scheme_pos) {
  return (static_cast<std::uint64_t>(step) << 16) | static_cast<std::uint64_t>(scheme_pos);
}

ComplexMatrix target_on_grid(const ExperimentConfig& c, const DiscreteGrid& grid,
                             const ComplexMatrix& span_values) {
  const auto k = static_cast<Eigen::Index>(grid.size());
  if (c.function == TestFunctionId::InSpan) {
    Rng rng(StreamId{c.seed, StreamPurpose::Problem, 0, 0});
    ComplexMatrix coeffs(span_values.cols(), c.outputs);
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j)
      for (Eigen::Index i = 0; i < coeffs.rows(); ++i) coeffs(i, j) = Complex(rng.normal(), 0.0);
    return span_values * coeffs;
  }
  ComplexMatrix f(k, 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto y = grid.point(static_cast<std::size_t>(i));
    const double v = c.function == TestFunctionId::User ? c.user_function(y) : eval_test_function(c.function, y);
    if (!std::isfinite(v)) throw NumericalError("target is not finite at grid point " + std::to_string(i));
    f(i, 0) = Complex(v, 0.0);
  }
  return f;
}

ComplexMatrix gather_rows(const ComplexMatrix& values, const std::vector<std::size_t>& ids, Eigen::Index cols) {
  ComplexMatrix out(static_cast<Eigen::Index>(ids.size()), cols);
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(ids[i])).leftCols(cols);
  return out;
}

void add_noise(ComplexMatrix& values, double sigma, const StreamId& id) {
  if (sigma == 0.0) return;
  Rng rng(id);
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    for (Eigen::Index i = 0; i < values.rows(); ++i) values(i, j) += Complex(sigma * rng.normal(), 0.0);
}

SamplingPlan plan_for(Scheme scheme, const DiscreteGrid& grid, const ComplexMatrix& q, const ComplexMatrix& b) {
  switch (scheme) {
    case Scheme::MonteCarlo:
      return monte_carlo_plan(grid.size());
    case Scheme::LSOptimalNonhier:
    case Scheme::LSOptimalHier: {
      SamplingPlan plan = ls_optimal_plan(q);
      plan.scheme = scheme;
      return plan;
    }
    case Scheme::CSOptimal:
      return cs_optimal_plan(b);
    case Scheme::Preconditioned:
      return preconditioned_plan(grid);
  }
  throw DomainError("unknown scheme");
}

std::vector<MultiIndexSet> build_ladder(const ExperimentConfig& c) {
  std::vector<MultiIndexSet> ladder;
  for (int t : c.orders) {
    MultiIndexSet set = gen_index_set(c.index_family, c.dimension, t, c.ordering);
    if (c.basis == BasisFamily::TensorFourier) set = reorder(signed_variant(set), c.ordering);
    if (ladder.empty())
      ladder.push_back(std::move(set));
    else
      ladder.push_back(nested_extension(ladder.back(), set));
  }
  return ladder;
}

DictionarySpec source_spec(const ExperimentConfig& c, const MultiIndexSet& set) {
  return c.basis == BasisFamily::TensorFourier ? DictionarySpec::fourier(set) : DictionarySpec::legendre(set);
}

json constants_json(const ComplexMatrix& b, const ComplexMatrix& q, const std::vector<SamplingPlan>& plans,
                    const std::vector<Scheme>& schemes) {
  const OrthoConstants oc = ortho_constants(b);
  const RieszConstants rc = riesz_constants(b);
  const OrthoConstants qc = ortho_constants(q);
  json j{{"theta_sq", oc.theta_sq}, {"Theta_sq", oc.Theta_sq}, {"riesz_a", rc.a}, {"riesz_b", rc.b},
         {"theta_sq_ortho", qc.theta_sq}, {"Theta_sq_ortho", qc.Theta_sq}};
  const RealVector christoffel = christoffel_on_grid(q);
  json nik = json::object();
  for (std::size_t p = 0; p < plans.size(); ++p) nik[to_string(schemes[p])] = nikolskii_sq(christoffel, plans[p].weights);
  j["nikolskii_sq"] = nik;
  return j;
}

using Clock = std::chrono::steady_clock;

double elapsed(bool timing, Clock::time_point start) {
  if (!timing) return 0.0;
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void run_least_squares(const ExperimentConfig& c, const std::shared_ptr<const DiscreteGrid>& grid,
                       const std::vector<MultiIndexSet>& ladder, std::vector<TrialRecord>& records,
                       json& meta, FailureLog& failures) {
  const DictionarySpec spec = source_spec(c, ladder.back());
  const ComplexMatrix raw = assemble_eval_matrix(spec, grid->points, Scaling::OneOverSqrtK).values;
  const OrthoBasis basis = orthonormalize(raw, spec, grid);
  const double sqrt_k = std::sqrt(static_cast<double>(grid->size()));
  const ComplexMatrix upsilon = sqrt_k * basis.q();
  const ComplexMatrix f = target_on_grid(c, *grid, upsilon);
  const auto outputs = f.cols();

  std::vector<Step> steps;
  for (std::size_t t = 0; t < ladder.size(); ++t) {
    Step st{c.orders[t], ladder[t].size(), 0};
    if (c.m_rule == MRule::SLogS)
      st.m = slogs_samples(st.s);
    else
      st.m = c.m_values.size() == 1 ? c.m_values[0] : c.m_values[t];
    steps.push_back(st);
  }

  std::vector<HierarchicalSampler> hier;
  for (int trial = 0; trial < c.trials; ++trial)
    hier.emplace_back(*grid, StreamId{c.seed, StreamPurpose::Hierarchical, static_cast<std::uint64_t>(trial), 0});

  meta["ladder"] = json::array();
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Step& st = steps[t];
    const auto s = static_cast<Eigen::Index>(st.s);
    const ComplexMatrix q = basis.q().leftCols(s);
    std::vector<SamplingPlan> plans;
    std::optional<std::string> plan_error;
    try {
      for (Scheme scheme : c.schemes) plans.push_back(plan_for(scheme, *grid, q, q));
    } catch (const std::exception& e) {
      plan_error = e.what();
    }
    json step_meta{{"step", t}, {"order", st.order}, {"s", st.s}, {"m", st.m}};
    if (!plan_error) step_meta["constants"] = constants_json(raw.leftCols(s), q, plans, c.schemes);
    meta["ladder"].push_back(step_meta);

    for (int trial = 0; trial < c.trials; ++trial) {
      for (std::size_t p = 0; p < c.schemes.size(); ++p) {
        const Scheme scheme = c.schemes[p];
        TrialRecord rec{scheme, st.m, st.s, trial, std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(), 0.0, t};
        const auto start = Clock::now();
        try {
          if (plan_error) throw Error(*plan_error);
          SampleSet samples;
          if (scheme == Scheme::LSOptimalHier) {
            samples = hier[static_cast<std::size_t>(trial)].draw(q, st.m);
          } else {
            Rng rng(StreamId{c.seed, StreamPurpose::Samples, static_cast<std::uint64_t>(trial), stream_sub(t, p)});
            samples = draw(plans[p], *grid, st.m, rng);
          }
          ComplexMatrix values = gather_rows(f, samples.point_ids, outputs);
          add_noise(values, c.noise_sigma,
                    StreamId{c.seed, StreamPurpose::Noise, static_cast<std::uint64_t>(trial), stream_sub(t, p)});
          const LsSystem sys = assemble_ls_rows(gather_rows(upsilon, samples.point_ids, s), samples.weights, values);
          const FitResult fit = solve_ls(sys.a, sys.v);
          rec.rel_err = relative_linf_error(f, upsilon.leftCols(s) * fit.coefficients);
          rec.alpha_hat = fit.alpha_hat;
        } catch (const std::exception& e) {
          failures.add(scheme, t, trial, e.what());
        }
        rec.seconds = elapsed(c.timing, start);
        records.push_back(rec);
      }
    }
  }
}

void run_sparse(const ExperimentConfig& c, const std::shared_ptr<const DiscreteGrid>& grid,
                const std::vector<MultiIndexSet>& ladder, std::vector<TrialRecord>& records, json& meta,
                FailureLog& failures) {
  const DictionarySpec spec = source_spec(c, ladder.back());
  const auto n = static_cast<Eigen::Index>(spec.size());
  const double sqrt_k = std::sqrt(static_cast<double>(grid->size()));
  const ComplexMatrix raw = assemble_eval_matrix(spec, grid->points, Scaling::OneOverSqrtK).values;

  // The grid QR is needed for the orthonormalized dictionary and for the
  // Nikolskii report; the latter is skipped when the raw dictionary is
  // numerically degenerate on the grid.
  std::optional<OrthoBasis> basis;
  try {
    basis = orthonormalize(raw, spec, grid);
  } catch (const NumericalError&) {
    if (c.basis == BasisFamily::GridOrthogonalized) throw;
  }
  const bool ortho = c.basis == BasisFamily::GridOrthogonalized;
  const ComplexMatrix b = ortho ? basis->q() : raw;
  const ComplexMatrix dictionary = sqrt_k * b;
  const ComplexMatrix f = target_on_grid(c, *grid, dictionary);
  const auto outputs = f.cols();

  std::vector<SamplingPlan> plans;
  for (Scheme scheme : c.schemes) plans.push_back(plan_for(scheme, *grid, b, b));
  std::vector<RealVector> weights(plans.size());
  if (c.solver == SolverKind::L1Weighted)
    for (std::size_t p = 0; p < plans.size(); ++p) {
      const RealVector unit = RealVector::Ones(static_cast<Eigen::Index>(grid->size()));
      weights[p] = lower_set_weights(dictionary, c.l1_weights == L1Weights::Plan ? plans[p].weights : unit);
    }

  const std::vector<std::size_t> ladder_m =
      c.m_rule == MRule::Explicit ? c.m_values : default_cs_ladder(static_cast<std::size_t>(n));

  json constants;
  if (basis)
    constants = constants_json(b, basis->q(), plans, c.schemes);
  else
    constants = json{{"theta_sq", ortho_constants(b).theta_sq}, {"Theta_sq", ortho_constants(b).Theta_sq},
                     {"riesz_a", riesz_constants(b).a}, {"riesz_b", riesz_constants(b).b}};
  meta["dictionary"] = {{"n", n}, {"order", c.orders.back()}, {"constants", constants}};
  if (c.solver == SolverKind::L1Weighted) {
    json w = json::object();
    for (std::size_t p = 0; p < plans.size(); ++p)
      w[to_string(c.schemes[p])] = weighted_cardinality({weights[p].data(), static_cast<std::size_t>(weights[p].size())});
    meta["dictionary"]["weighted_cardinality"] = w;
  }
  meta["ladder"] = json::array();

  for (std::size_t t = 0; t < ladder_m.size(); ++t) {
    const std::size_t m = ladder_m[t];
    // Sparsity level implied by m ~ s log n, used for the default lambda.
    const double s_target = std::max(1.0, static_cast<double>(m) / std::log(std::max<double>(static_cast<double>(n), 2.0)));
    const double lambda = c.lambda ? *c.lambda : default_lambda(s_target);
    meta["ladder"].push_back({{"step", t}, {"m", m}, {"lambda", lambda}, {"s_target", s_target}});

    for (int trial = 0; trial < c.trials; ++trial) {
      for (std::size_t p = 0; p < c.schemes.size(); ++p) {
        const Scheme scheme = c.schemes[p];
        TrialRecord rec{scheme, m, static_cast<std::size_t>(n), trial, std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(), 0.0, t};
        const auto start = Clock::now();
        try {
          Rng rng(StreamId{c.seed, StreamPurpose::Samples, static_cast<std::uint64_t>(trial), stream_sub(t, p)});
          const SampleSet samples = draw(plans[p], *grid, m, rng);
          ComplexMatrix values = gather_rows(f, samples.point_ids, outputs);
          add_noise(values, c.noise_sigma,
                    StreamId{c.seed, StreamPurpose::Noise, static_cast<std::uint64_t>(trial), stream_sub(t, p)});
          const LsSystem sys = assemble_ls_rows(gather_rows(dictionary, samples.point_ids, n), samples.weights, values);
          SrLassoProblem problem;
          problem.a = sys.a;
          problem.v = sys.v;
          problem.lambda = lambda;
          problem.weights = weights[p];
          problem.options.max_iters = c.max_iters;
          problem.options.tolerance = c.tolerance;
          const RecoveryResult fit = sr_lasso(problem);
          rec.rel_err = relative_linf_error(f, dictionary * fit.coefficients);
          if (static_cast<Eigen::Index>(m) < n)
            rec.alpha_hat = 0.0;
          else
            rec.alpha_hat = estimate_alpha_beta(sys.a, ortho || !basis ? std::nullopt
                                                                       : std::optional<ComplexMatrix>(basis->r()))
                                .alpha;
        } catch (const std::exception& e) {
          failures.add(scheme, t, trial, e.what());
        }
        rec.seconds = elapsed(c.timing, start);
        records.push_back(rec);
      }
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Domain domain = parse_domain(config.domain, config.dimension);
  const std::vector<MultiIndexSet> ladder = build_ladder(config);
  const std::size_t n_max = ladder.back().size();
  const bool least_squares = config.solver == SolverKind::LeastSquares;
  const std::size_t k = config.grid_size ? *config.grid_size : (least_squares ? 30 : 10) * n_max;
  const StreamId grid_stream{config.seed, StreamPurpose::Grid, 0, 0};
  auto grid = std::make_shared<const DiscreteGrid>(mc_grid(domain, k, grid_stream));

  ExperimentResult result;
  json& meta = result.meta;
  meta["config"] = config_to_json(config);
  meta["grid"] = {{"k", k}, {"domain", domain.name()}, {"seed", config.seed}};
  meta["m_rule_log"] = "natural";
  meta["environment"] = {{"compiler", __VERSION__},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)}};
  FailureLog failures;
  if (least_squares)
    run_least_squares(config, grid, ladder, result.records, meta, failures);
  else
    run_sparse(config, grid, ladder, result.records, meta, failures);
  meta["failures"] = failures.entries;

  std::map<Scheme, std::size_t> position;
  for (std::size_t p = 0; p < config.schemes.size(); ++p) position.emplace(config.schemes[p], p);
  std::stable_sort(result.records.begin(), result.records.end(), [&](const TrialRecord& a, const TrialRecord& b) {
    const auto pa = position.at(a.scheme), pb = position.at(b.scheme);
    if (pa != pb) return pa < pb;
    if (a.step != b.step) return a.step < b.step;
    return a.trial < b.trial;
  });

  // Per (scheme, step) log statistics for quick inspection.
  json summary = json::array();
  for (std::size_t i = 0; i < result.records.size();) {
    std::size_t j = i;
    std::vector<double> errs;
    while (j < result.records.size() && result.records[j].scheme == result.records[i].scheme &&
           result.records[j].step == result.records[i].step) {
      if (std::isfinite(result.records[j].rel_err)) errs.push_back(result.records[j].rel_err);
      ++j;
    }
    json entry{{"scheme", to_string(result.records[i].scheme)}, {"m", result.records[i].m},
               {"s", result.records[i].s}, {"trials", errs.size()}};
    if (!errs.empty()) {
      const LogStats ls = log_stats(errs);
      entry["log_mean"] = ls.log_mean;
      entry["log_std"] = ls.log_std;
    }
    summary.push_back(entry);
    i = j;
  }
  meta["summary"] = summary;
  return result;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "scheme,m,s,trial,rel_err,alpha_hat,seconds\n";
  for (const auto& r : records)
    out << to_string(r.scheme) << ',' << r.m << ',' << r.s << ',' << r.trial << ',' << format_double(r.rel_err)
        << ',' << format_double(r.alpha_hat) << ',' << format_double(r.seconds) << '\n';
  return out.str();
}

void write_experiment(const ExperimentResult& result, const std::string& run_id, const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory.empty() ? "." : directory);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / (run_id + ".csv"), std::ios::binary);
    if (!csv) throw FormatError("cannot write " + (dir / (run_id + ".csv")).string());
    csv << records_to_csv(result.records);
  }
  std::ofstream meta(dir / (run_id + ".meta.json"), std::ios::binary);
  if (!meta) throw FormatError("cannot write " + (dir / (run_id + ".meta.json")).string());
  meta << result.meta.dump(2) << '\n';
}

}  // namespace sparse_sampler
