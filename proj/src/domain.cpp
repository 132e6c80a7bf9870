#include "sparse_sampler/domain.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

namespace sparse_sampler {

Domain::Domain(DomainKind kind, std::size_t d, double r, Membership membership,
               std::string name)
    : kind_(kind), dimension_(d), inner_radius_(r), membership_(std::move(membership)),
      name_(std::move(name)) {
  if (d < 1) throw DomainError("domain dimension must be >= 1");
}

Domain Domain::hypercube(std::size_t d) { return {DomainKind::Hypercube, d, 0.0, {}, "D1"}; }

Domain Domain::annulus(std::size_t d, double r_inner) {
  if (!(r_inner >= 0.0 && r_inner < 1.0)) throw DomainError("annulus inner radius must lie in [0, 1)");
  return {DomainKind::Annulus, d, r_inner, {}, "D2"};
}

Domain Domain::cut_cube(std::size_t d) { return {DomainKind::HalfspaceCutCube, d, 0.0, {}, "D3"}; }

Domain Domain::torus(std::size_t d) { return {DomainKind::Torus, d, 0.0, {}, "torus"}; }

Domain Domain::predicate(std::size_t d, Membership membership, std::string name) {
  if (!membership) throw DomainError("predicate domain needs a membership callback");
  return {DomainKind::Predicate, d, 0.0, std::move(membership), std::move(name)};
}

bool Domain::contains(std::span<const double> y) const {
  if (y.size() != dimension_)
    throw ShapeError("point dimension " + std::to_string(y.size()) +
                     " does not match domain dimension " + std::to_string(dimension_));
  if (kind_ == DomainKind::Torus) {
    for (double v : y)
      if (!(v >= 0.0 && v < 1.0)) return false;
    return true;
  }
  for (double v : y)
    if (!(std::abs(v) <= 1.0)) return false;
  switch (kind_) {
    case DomainKind::Hypercube:
    case DomainKind::Torus:
      return true;
    case DomainKind::Annulus: {
      const double norm_sq = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
      return inner_radius_ * inner_radius_ <= norm_sq && norm_sq <= 1.0;
    }
    case DomainKind::HalfspaceCutCube:
      return std::accumulate(y.begin(), y.end(), 0.0) <= 1.0;
    case DomainKind::Predicate:
      return membership_(y);
  }
  return false;
}

Domain parse_domain(const std::string& text, std::size_t d) {
  if (text == "D1" || text == "hypercube") return Domain::hypercube(d);
  if (text == "D2" || text == "annulus") return Domain::annulus(d);
  if (text == "D3" || text == "cut_cube") return Domain::cut_cube(d);
  if (text == "torus") return Domain::torus(d);
  throw FormatError("unknown domain '" + text + "'");
}

Points sample_uniform(const Domain& domain, std::size_t count, Rng& rng,
                      const RejectionLimits& limits, std::size_t* proposals) {
  const std::size_t d = domain.dimension();
  Points out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  const bool torus = domain.kind() == DomainKind::Torus;
  std::vector<double> y(d);
  std::size_t tried = 0;
  std::size_t accepted = 0;
  while (accepted < count) {
    for (auto& v : y) v = torus ? rng.uniform() : rng.uniform(-1.0, 1.0);
    ++tried;
    if (domain.contains(y)) {
      for (std::size_t k = 0; k < d; ++k) out(static_cast<Eigen::Index>(accepted), static_cast<Eigen::Index>(k)) = y[k];
      ++accepted;
    }
    if (tried >= limits.probe_proposals &&
        static_cast<double>(accepted) < limits.min_acceptance * static_cast<double>(tried))
      throw SamplingError("rejection sampler acceptance rate below " +
                          std::to_string(limits.min_acceptance) + " for domain " + domain.name());
  }
  if (proposals) *proposals = tried;
  return out;
}

DiscreteGrid mc_grid(const Domain& domain, std::size_t k, const StreamId& stream,
                     const RejectionLimits& limits) {
  if (k < 1) throw DomainError("grid size must be >= 1");
  Rng rng(stream);
  return {sample_uniform(domain, k, rng, limits), stream};
}

DiscreteGrid equispaced_torus_grid(std::size_t d, std::size_t per_dim) {
  if (d < 1 || per_dim < 1) throw DomainError("equispaced grid needs d >= 1 and per_dim >= 1");
  std::size_t k = 1;
  for (std::size_t i = 0; i < d; ++i) k *= per_dim;
  DiscreteGrid grid{Points(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)), {}};
  std::vector<std::size_t> digits(d, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < d; ++c)
      grid.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          static_cast<double>(digits[c]) / static_cast<double>(per_dim);
    for (std::size_t c = d; c-- > 0;) {
      if (++digits[c] < per_dim) break;
      digits[c] = 0;
    }
  }
  return grid;
}

RealVector uniform_probs(const DiscreteGrid& grid) {
  const auto k = static_cast<Eigen::Index>(grid.size());
  return RealVector::Constant(k, 1.0 / static_cast<double>(k));
}

void save_grid(const std::string& path, const DiscreteGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  const std::int64_t header[2] = {static_cast<std::int64_t>(grid.dimension()),
                                  static_cast<std::int64_t>(grid.size())};
  const std::uint64_t stream[4] = {grid.stream.seed,
                                   static_cast<std::uint64_t>(grid.stream.purpose),
                                   grid.stream.trial, grid.stream.sub};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(stream), sizeof stream);
  out.write(reinterpret_cast<const char*>(grid.points.data()),
            static_cast<std::streamsize>(sizeof(double) * grid.points.size()));
  if (!out) throw FormatError("write to '" + path + "' failed");
}

DiscreteGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::int64_t header[2];
  std::uint64_t stream[4];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(stream), sizeof stream);
  if (!in || header[0] < 1 || header[1] < 1) throw FormatError("bad grid header in '" + path + "'");
  DiscreteGrid grid{Points(header[1], header[0]),
                    {stream[0], static_cast<StreamPurpose>(stream[1]), stream[2], stream[3]}};
  in.read(reinterpret_cast<char*>(grid.points.data()),
          static_cast<std::streamsize>(sizeof(double) * grid.points.size()));
  if (!in) throw FormatError("truncated grid file '" + path + "'");
  return grid;
}

}  // namespace sparse_sampler
