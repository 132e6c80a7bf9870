#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "sparse_sampler/rng.hpp"
#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

enum class DomainKind { Hypercube, Annulus, HalfspaceCutCube, Torus, Predicate };

/// Sampling domain inside the box [-1,1]^d (the torus [0,1)^d for
/// trigonometric dictionaries). Membership uses closed-set comparisons.
class Domain {
 public:
  using Membership = std::function<bool(std::span<const double>)>;

  /// D1 = [-1,1]^d.
  static Domain hypercube(std::size_t d);
  /// D2 = {r_inner^2 <= |y|^2 <= 1}.
  static Domain annulus(std::size_t d, double r_inner = 0.5);
  /// D3 = {y in [-1,1]^d : sum y_k <= 1}.
  static Domain cut_cube(std::size_t d);
  static Domain torus(std::size_t d);
  /// Subset of [-1,1]^d described by a membership callback.
  static Domain predicate(std::size_t d, Membership membership, std::string name = "predicate");

  DomainKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  double inner_radius() const { return inner_radius_; }
  const std::string& name() const { return name_; }

  bool contains(std::span<const double> y) const;

 private:
  Domain(DomainKind kind, std::size_t d, double r, Membership membership, std::string name);

  DomainKind kind_;
  std::size_t dimension_;
  double inner_radius_ = 0.0;
  Membership membership_;
  std::string name_;
};

/// "D1"/"hypercube", "D2"/"annulus", "D3"/"cut_cube", "torus".
Domain parse_domain(const std::string& text, std::size_t d);

/// k points and the uniform discrete measure tau = (1/k) sum delta_{z_i}.
struct DiscreteGrid {
  Points points;
  StreamId stream;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(points.cols()); }
  std::span<const double> point(std::size_t i) const {
    return {points.row(static_cast<Eigen::Index>(i)).data(), dimension()};
  }
};

struct RejectionLimits {
  std::size_t probe_proposals = 1'000'000;
  double min_acceptance = 1e-4;
};

/// k independent points uniform on the domain, by rejection from the
/// uniform measure on the bounding box. Pure function of (domain, k, stream).
DiscreteGrid mc_grid(const Domain& domain, std::size_t k, const StreamId& stream,
                     const RejectionLimits& limits = {});

/// Points uniform on the domain drawn from an existing generator. Returns
/// the number of proposals used through `proposals` when non-null.
Points sample_uniform(const Domain& domain, std::size_t count, Rng& rng,
                      const RejectionLimits& limits = {}, std::size_t* proposals = nullptr);

/// Tensor grid of `per_dim`^d equispaced points j/per_dim on the torus.
DiscreteGrid equispaced_torus_grid(std::size_t d, std::size_t per_dim);

RealVector uniform_probs(const DiscreteGrid& grid);

/// Binary layout: int64 d, int64 k, uint64 seed, uint64 purpose,
/// uint64 trial, uint64 sub, then k*d row-major doubles.
void save_grid(const std::string& path, const DiscreteGrid& grid);
DiscreteGrid load_grid(const std::string& path);

}  // namespace sparse_sampler
