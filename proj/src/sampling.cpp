#include "sparse_sampler/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparse_sampler/ortho.hpp"

namespace sparse_sampler {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::MonteCarlo:
      return "mc";
    case Scheme::LSOptimalNonhier:
      return "opt-nonhier";
    case Scheme::LSOptimalHier:
      return "opt-hier";
    case Scheme::CSOptimal:
      return "cs-opt";
    case Scheme::Preconditioned:
      return "precond";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "mc") return Scheme::MonteCarlo;
  if (text == "opt-nonhier") return Scheme::LSOptimalNonhier;
  if (text == "opt-hier") return Scheme::LSOptimalHier;
  if (text == "cs-opt") return Scheme::CSOptimal;
  if (text == "precond") return Scheme::Preconditioned;
  throw FormatError("unknown sampling scheme '" + text + "'");
}

RealVector christoffel_on_grid(const ComplexMatrix& q, double orthonormality_tol) {
  const Eigen::Index s = q.cols();
  const ComplexMatrix gram = q.adjoint() * q;
  const double defect = (gram - ComplexMatrix::Identity(s, s)).cwiseAbs().maxCoeff();
  if (!(defect <= orthonormality_tol))
    throw NumericalError("christoffel_on_grid: columns are not orthonormal (defect " +
                         std::to_string(defect) + ")");
  return static_cast<double>(q.rows()) * q.cwiseAbs2().rowwise().sum();
}

SamplingPlan monte_carlo_plan(std::size_t k) {
  if (k < 1) throw DomainError("monte_carlo_plan: empty grid");
  const auto rows = static_cast<Eigen::Index>(k);
  return {Scheme::MonteCarlo, RealVector::Constant(rows, 1.0 / static_cast<double>(k)),
          RealVector::Ones(rows)};
}

SamplingPlan ls_optimal_plan(const ComplexMatrix& q) {
  const RealVector christoffel = christoffel_on_grid(q);
  const double k = static_cast<double>(q.rows());
  const double s = static_cast<double>(q.cols());
  SamplingPlan plan{Scheme::LSOptimalNonhier, RealVector(q.rows()), RealVector(q.rows())};
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const double ki = christoffel(i);
    plan.probs(i) = ki / (k * s);
    plan.weights(i) = ki > 0.0 ? s / ki : kOffSupportWeight;
  }
  return plan;
}

SamplingPlan cs_optimal_plan(const ComplexMatrix& b) {
  if (!b.allFinite()) throw NumericalError("cs_optimal_plan: nonfinite matrix");
  const RealVector row_max = b.cwiseAbs2().rowwise().maxCoeff();
  const double theta_sq = row_max.sum();
  if (!(theta_sq > 0.0)) throw NumericalError("cs_optimal_plan: all-zero matrix");
  const double k = static_cast<double>(b.rows());
  SamplingPlan plan{Scheme::CSOptimal, row_max / theta_sq, RealVector(b.rows())};
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    plan.weights(i) = row_max(i) > 0.0 ? theta_sq / (k * row_max(i)) : kOffSupportWeight;
  return plan;
}

double preconditioning_weight(std::span<const double> y) {
  double w = 1.0;
  for (double v : y) {
    if (!(std::abs(v) <= 1.0)) throw DomainError("preconditioning weight: point outside [-1,1]^d");
    w *= std::numbers::pi / 2.0 * std::sqrt(1.0 - v * v);
  }
  return w;
}

SamplingPlan preconditioned_plan(const DiscreteGrid& grid) {
  const auto k = static_cast<Eigen::Index>(grid.size());
  if (k < 1) throw DomainError("preconditioned_plan: empty grid");
  RealVector inverse(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double w = preconditioning_weight(grid.point(static_cast<std::size_t>(i)));
    if (!(w > 0.0))
      throw DomainError("preconditioned_plan: grid point " + std::to_string(i) +
                        " lies on the cube boundary where 1/w is infinite");
    inverse(i) = 1.0 / w;
  }
  const double total = inverse.sum();
  // Discrete normalization (1/k) sum 1/w = 1: rescale w by total / k.
  const double scale = total / static_cast<double>(k);
  SamplingPlan plan{Scheme::Preconditioned, inverse / total, RealVector(k)};
  for (Eigen::Index i = 0; i < k; ++i) plan.weights(i) = scale / inverse(i);
  return plan;
}

namespace {

std::vector<double> cumulative(const RealVector& probs) {
  std::vector<double> cdf(static_cast<std::size_t>(probs.size()));
  double running = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs(i) >= 0.0)) throw NumericalError("sampling plan has a negative probability");
    running += probs(i);
    cdf[static_cast<std::size_t>(i)] = running;
  }
  return cdf;
}

std::size_t last_supported(const RealVector& probs) {
  for (Eigen::Index i = probs.size(); i-- > 0;)
    if (probs(i) > 0.0) return static_cast<std::size_t>(i);
  throw NumericalError("sampling plan has no support");
}

std::size_t draw_one(const std::vector<double>& cdf, std::size_t last, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto id = static_cast<std::size_t>(it - cdf.begin());
  return std::min(id, last);
}

SampleSet gather(const DiscreteGrid& grid, std::vector<std::size_t> ids, const RealVector& weights,
                 Scheme scheme, const StreamId& stream) {
  SampleSet out;
  out.scheme = scheme;
  out.stream = stream;
  out.points.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(grid.dimension()));
  out.weights.resize(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out.points.row(row) = grid.points.row(static_cast<Eigen::Index>(ids[i]));
    out.weights(row) = weights(static_cast<Eigen::Index>(ids[i]));
  }
  out.point_ids = std::move(ids);
  return out;
}

RealVector column_density(const ComplexMatrix& q, Eigen::Index j) { return q.col(j).cwiseAbs2(); }

}  // namespace

SampleSet draw(const SamplingPlan& plan, const DiscreteGrid& grid, std::size_t m, Rng& rng) {
  if (m < 1) throw DomainError("draw: m must be >= 1");
  if (plan.grid_size() != grid.size()) throw ShapeError("draw: plan and grid sizes differ");
  const auto cdf = cumulative(plan.probs);
  const std::size_t last = last_supported(plan.probs);
  std::vector<std::size_t> ids(m);
  for (auto& id : ids) id = draw_one(cdf, last, rng);
  return gather(grid, std::move(ids), plan.weights, plan.scheme, rng.id());
}

SampleSet draw_continuous_uniform(const Domain& domain, std::size_t m, Rng& rng) {
  if (domain.kind() != DomainKind::Hypercube && domain.kind() != DomainKind::Torus)
    throw DomainError("continuous draws are closed-form only on the hypercube and torus");
  SampleSet out;
  out.scheme = Scheme::MonteCarlo;
  out.stream = rng.id();
  out.points = sample_uniform(domain, m, rng);
  out.weights = RealVector::Ones(static_cast<Eigen::Index>(m));
  return out;
}

SampleSet ls_hierarchical_draw(const ComplexMatrix& q, const DiscreteGrid& grid, std::size_t m,
                               const StreamId& base) {
  const auto s = static_cast<std::size_t>(q.cols());
  if (s == 0 || m == 0 || m % s != 0)
    throw DomainError("ls_hierarchical_draw: m must be a positive multiple of s");
  HierarchicalSampler sampler(grid, base);
  return sampler.draw(q, m);
}

HierarchicalSampler::HierarchicalSampler(const DiscreteGrid& grid, StreamId base)
    : grid_(&grid), base_(base) {}

SampleSet HierarchicalSampler::draw(const ComplexMatrix& q, std::size_t m) {
  if (static_cast<std::size_t>(q.rows()) != grid_->size())
    throw ShapeError("hierarchical draw: Q rows differ from grid size");
  const auto s = static_cast<std::size_t>(q.cols());
  if (s == 0 || m == 0) throw DomainError("hierarchical draw: need s >= 1 and m >= 1");
  const SamplingPlan optimal = ls_optimal_plan(q);
  const std::size_t per_column = m / s;
  const std::size_t remainder = m - per_column * s;

  if (per_column_.size() < s) per_column_.resize(s);
  std::vector<std::size_t> ids;
  ids.reserve(m);
  for (std::size_t j = 0; j < s; ++j) {
    auto& drawn = per_column_[j];
    if (drawn.size() < per_column) {
      // Regenerate the column stream from the start and skip what is kept.
      StreamId id = base_;
      id.sub = j + 1;
      Rng rng(id);
      const RealVector density = column_density(q, static_cast<Eigen::Index>(j));
      const auto cdf = cumulative(density);
      const std::size_t last = last_supported(density);
      std::vector<std::size_t> fresh(per_column);
      for (auto& f : fresh) f = draw_one(cdf, last, rng);
      for (std::size_t c = 0; c < drawn.size(); ++c) fresh[c] = drawn[c];
      drawn = std::move(fresh);
    }
    ids.insert(ids.end(), drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(per_column));
  }
  if (remainder > 0) {
    if (mixture_.size() < remainder) {
      StreamId id = base_;
      id.sub = 0;
      Rng rng(id);
      const auto cdf = cumulative(optimal.probs);
      const std::size_t last = last_supported(optimal.probs);
      std::vector<std::size_t> fresh(remainder);
      for (auto& f : fresh) f = draw_one(cdf, last, rng);
      for (std::size_t c = 0; c < mixture_.size(); ++c) fresh[c] = mixture_[c];
      mixture_ = std::move(fresh);
    }
    ids.insert(ids.end(), mixture_.begin(), mixture_.begin() + static_cast<std::ptrdiff_t>(remainder));
  }
  SampleSet out = gather(*grid_, std::move(ids), optimal.weights, Scheme::LSOptimalHier, base_);
  return out;
}

double nikolskii_sq(const RealVector& christoffel, const RealVector& weights) {
  if (christoffel.size() != weights.size()) throw ShapeError("nikolskii_sq: size mismatch");
  double best = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (std::isfinite(weights(i))) best = std::max(best, weights(i) * christoffel(i));
  return best;
}

ConstantsReport constants_report(const ComplexMatrix& b, const ComplexMatrix& q,
                                 const RealVector& plan_weights) {
  if (b.rows() != q.rows() || b.rows() != plan_weights.size())
    throw ShapeError("constants_report: B, Q and weights must share the grid size");
  ConstantsReport report;
  const OrthoConstants c = ortho_constants(b);
  report.theta_sq = c.theta_sq;
  report.Theta_sq = c.Theta_sq;
  report.nikolskii_sq = nikolskii_sq(christoffel_on_grid(q), plan_weights);
  const RieszConstants riesz = riesz_constants(b);
  report.riesz_a = riesz.a;
  report.riesz_b = riesz.b;
  return report;
}

double legendre_Theta_sq(const MultiIndexSet& set) {
  double best = 0.0;
  for (const auto& index : set) {
    double v = 1.0;
    for (int e : index) v *= 2.0 * e + 1.0;
    best = std::max(best, v);
  }
  return best;
}

}  // namespace sparse_sampler
