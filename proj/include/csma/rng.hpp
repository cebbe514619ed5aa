#pragma once

#include <cmath>
#include <cstdint>

namespace csma {

// SplitMix64 stream. Small, fast, and fully specified here so that results
// are reproducible across platforms and standard library versions (the
// std:: distributions are not).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate (mean 1/rate). Never returns infinity.
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and a stream id.
// Streams for distinct ids do not interact, so adding a node (or a grid
// point) never perturbs the draws seen by the others.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 0x632be59bd9b4e019ULL)));
  g.next();
  return g.next();
}

}  // namespace csma
