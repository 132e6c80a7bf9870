#pragma once

#include <cstdint>
#include <random>

namespace sparse_sampler {

/// Purpose tags keep grids, sample draws and noise on independent streams.
enum class StreamPurpose : std::uint64_t {
  Grid = 1,
  Samples = 2,
  Noise = 3,
  Problem = 4,
  Hierarchical = 5,
};

struct StreamId {
  std::uint64_t seed = 0;
  StreamPurpose purpose = StreamPurpose::Samples;
  std::uint64_t trial = 0;
  std::uint64_t sub = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic generator for one stream. Two Rng objects built from equal
/// StreamIds produce identical sequences.
class Rng {
 public:
  explicit Rng(const StreamId& id);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t next_u64() { return engine_(); }

  const StreamId& id() const { return id_; }

 private:
  StreamId id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace sparse_sampler
