#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "nfmove/geometry.hpp"
#include "nfmove/waveform.hpp"

namespace nfmove {

enum class NoiseMode { enabled, disabled };

struct Observation {
  std::vector<Eigen::VectorXcd> per_symbol;  // r_l
  Eigen::VectorXcd stacked;                  // [r_0; r_1; ...]
  std::uint64_t seed = 0;
};

/// r_l = b a_l a_l^T s_l + z_l, z_l ~ CN(0, sigma^2 I). Noise for symbol l
/// comes from substream (seed, noise, l).
Observation synthesize(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws,
                       std::uint64_t seed, NoiseMode mode = NoiseMode::enabled);
Observation synthesize(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws,
                       std::uint64_t seed, NoiseMode mode = NoiseMode::enabled);

/// Noise-free stacked mean mu(eta).
Eigen::VectorXcd mean_vector(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws);
Eigen::VectorXcd mean_vector(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws);

// Observation interchange file. All fields little-endian:
//   char[8]  magic "NFMOBS01"
//   u32      architecture (0 moving, 1 fixed, 2 extended)
//   u32      n_elements, u32 n_symbols
//   u64      seed
//   f64 x 10 spacing, speed, symbol_duration, target_x, target_y,
//            reflection re, reflection im, noise_power, tx_power, wavelength
//   u32      samples per symbol (M), then n_symbols * M complex samples as
//            interleaved (re, im) f64 pairs, symbol-major.
struct ObservationRecord {
  ArrayConfig cfg;
  Scene scene;
  Architecture architecture = Architecture::moving;
  Observation observation;
};

void write_observation(std::ostream& out, const ObservationRecord& record);
ObservationRecord read_observation(std::istream& in);

}  // namespace nfmove
