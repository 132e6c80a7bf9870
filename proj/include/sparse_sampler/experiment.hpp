#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "sparse_sampler/basis.hpp"
#include "sparse_sampler/index_sets.hpp"
#include "sparse_sampler/sampling.hpp"
#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

/// InSpan draws Gaussian coefficients on the largest index set of the run and
/// evaluates the expansion on the grid; User wraps a callback.
enum class TestFunctionId { F1, F2, F3, F4, InSpan, User };

std::string to_string(TestFunctionId id);
TestFunctionId parse_test_function(const std::string& text);

/// f1..f4 at y. F4 throws DomainError when sum sqrt|y_i| == 0.
double eval_test_function(TestFunctionId id, std::span<const double> y);

/// max_i ||f_i - fhat_i||_2 / max_i ||f_i||_2 over grid rows (K outputs per row).
double relative_linf_error(const ComplexMatrix& f, const ComplexMatrix& fhat);

inline constexpr double kErrorFloor = 1e-16;

struct LogStats {
  double log_mean = 0.0;
  /// exp of the population standard deviation of log errors.
  double log_std = 1.0;
};

LogStats log_stats(std::span<const double> errors);

enum class MRule { SLogS, Explicit };

/// Weights for l1-weighted runs. Sup: u = max_i |upsilon(z_i)| on the grid.
/// Plan: u = max_i sqrt(w_i) |upsilon(z_i)| with the sampling plan's w.
enum class L1Weights { Sup, Plan };
enum class SolverKind { LeastSquares, L1, L1Weighted };

std::string to_string(SolverKind kind);
SolverKind parse_solver_kind(const std::string& text);

/// m = ceil(s ln s), and m = s for s = 1.
std::size_t slogs_samples(std::size_t s);

/// 2^5, 2^6, ..., 2^12 capped at n (n itself appended once when capped).
std::vector<std::size_t> default_cs_ladder(std::size_t n);

struct ExperimentConfig {
  std::string run_id = "run";
  TestFunctionId function = TestFunctionId::F1;
  /// Required for TestFunctionId::User.
  std::function<double(std::span<const double>)> user_function;
  std::size_t dimension = 1;
  std::string domain = "D1";
  BasisFamily basis = BasisFamily::TensorLegendre;
  IndexFamily index_family = IndexFamily::HyperbolicCross;
  Ordering ordering = Ordering::TotalDegree;
  /// Least squares: one order per ladder step. l1: the last order fixes the set.
  std::vector<int> orders;
  std::vector<Scheme> schemes{Scheme::MonteCarlo};
  MRule m_rule = MRule::SLogS;
  /// Explicit m per step; a single value is broadcast over the ladder.
  std::vector<std::size_t> m_values;
  int trials = 50;
  std::optional<std::size_t> grid_size;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::LeastSquares;
  std::optional<double> lambda;
  L1Weights l1_weights = L1Weights::Sup;
  int max_iters = 4000;
  double tolerance = 1e-8;
  /// Output coordinates K (in-span targets only; f1..f4 are scalar).
  int outputs = 1;
  double noise_sigma = 0.0;
  /// Wall-clock timing breaks byte-identical reruns, so it is opt-in.
  bool timing = false;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
  Scheme scheme = Scheme::MonteCarlo;
  std::size_t m = 0;
  std::size_t s = 0;
  int trial = 0;
  double rel_err = 0.0;
  double alpha_hat = 0.0;
  double seconds = 0.0;
  /// Ladder position; used for ordering only.
  std::size_t step = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  nlohmann::json meta;
};

/// Runs every (trial, step, scheme) combination. Records come back sorted by
/// (scheme position in the config, step, trial). A failing step is logged in
/// meta["failures"] with a NaN record instead of aborting the run.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string records_to_csv(const std::vector<TrialRecord>& records);

/// Writes <dir>/<run_id>.csv and <dir>/<run_id>.meta.json.
void write_experiment(const ExperimentResult& result, const std::string& run_id,
                      const std::string& directory);

}  // namespace sparse_sampler
