#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace nfmove {

// Reproducible randomness. Every random quantity is drawn from a substream
// keyed by (master seed, domain, index): the key is hashed with SplitMix64
// into a seed for std::mt19937_64, whose output sequence is fixed by the
// standard. Normals use Box-Muller on 53-bit uniforms rather than
// std::normal_distribution, whose algorithm is implementation-defined.

enum class StreamDomain : std::uint64_t {
  waveform = 0x57415645ULL,
  noise = 0x4e4f4953ULL,
  trial = 0x5452494cULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(domain)) + index);
}

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  GaussianStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index)
      : engine_(substream_seed(seed, domain, index)) {}

  double standard_normal();

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> cscg(double variance);

 private:
  double uniform_open();  // (0, 1]

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace nfmove
