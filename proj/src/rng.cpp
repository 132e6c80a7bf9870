#include "sparse_sampler/rng.hpp"

namespace sparse_sampler {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t stream_key(const StreamId& id) {
  std::uint64_t h = splitmix64(id.seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(id.purpose));
  h = splitmix64(h ^ id.trial);
  h = splitmix64(h ^ id.sub);
  return h;
}

}  // namespace

Rng::Rng(const StreamId& id) : id_(id), engine_(stream_key(id)) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() { return normal_(engine_); }

}  // namespace sparse_sampler
