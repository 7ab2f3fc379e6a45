#include "nfmove/simulate.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "nfmove/channel.hpp"
#include "nfmove/errors.hpp"
#include "nfmove/rng.hpp"

namespace nfmove {

namespace {

void check_shapes(const ArrayTrack& track, const WaveformSet& ws) {
  bool ok = ws.n_symbols() == track.n_symbols();
  for (const auto& s : ws.symbols) ok = ok && s.size() == track.n_elements();
  if (!ok) throw ContractError("waveform shape does not match the array track");
}

std::vector<Eigen::VectorXcd> noiseless(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws) {
  scene.validate();
  check_shapes(track, ws);
  std::vector<Eigen::VectorXcd> out;
  out.reserve(track.n_symbols());
  Eigen::VectorXcd a;
  for (int l = 0; l < track.n_symbols(); ++l) {
    if (l == 0 || !track.is_static())
      a = steering_vector_at(track.row(l), scene.target_x, scene.target_y, scene.wavelength);
    const std::complex<double> g = a.transpose() * ws.symbols[l];
    out.push_back(a * (scene.reflection * g));
  }
  return out;
}

Eigen::VectorXcd stack(const std::vector<Eigen::VectorXcd>& parts) {
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  Eigen::VectorXcd out(total);
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    out.segment(offset, p.size()) = p;
    offset += p.size();
  }
  return out;
}

static_assert(std::endian::native == std::endian::little, "observation I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ContractError("truncated observation file");
  return value;
}

constexpr char kMagic[8] = {'N', 'F', 'M', 'O', 'B', 'S', '0', '1'};

}  // namespace

Observation synthesize(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws,
                       std::uint64_t seed, NoiseMode mode) {
  Observation obs;
  obs.seed = seed;
  obs.per_symbol = noiseless(track, scene, ws);
  if (mode == NoiseMode::enabled) {
    for (int l = 0; l < track.n_symbols(); ++l) {
      GaussianStream stream(seed, StreamDomain::noise, static_cast<std::uint64_t>(l));
      for (auto& r : obs.per_symbol[l]) r += stream.cscg(scene.noise_power);
    }
  }
  obs.stacked = stack(obs.per_symbol);
  return obs;
}

Observation synthesize(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws,
                       std::uint64_t seed, NoiseMode mode) {
  return synthesize(ArrayTrack::moving(cfg), scene, ws, seed, mode);
}

Eigen::VectorXcd mean_vector(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws) {
  return stack(noiseless(track, scene, ws));
}

Eigen::VectorXcd mean_vector(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws) {
  return mean_vector(ArrayTrack::moving(cfg), scene, ws);
}

void write_observation(std::ostream& out, const ObservationRecord& rec) {
  const auto& obs = rec.observation;
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.architecture));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.cfg.n_elements));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.cfg.n_symbols));
  put<std::uint64_t>(out, obs.seed);
  for (double v : {rec.cfg.spacing, rec.cfg.speed, rec.cfg.symbol_duration, rec.scene.target_x,
                   rec.scene.target_y, rec.scene.reflection.real(), rec.scene.reflection.imag(),
                   rec.scene.noise_power, rec.scene.tx_power, rec.scene.wavelength})
    put<double>(out, v);
  const std::uint32_t m = obs.per_symbol.empty() ? 0 : static_cast<std::uint32_t>(obs.per_symbol.front().size());
  put<std::uint32_t>(out, m);
  for (const auto& r : obs.per_symbol) {
    if (static_cast<std::uint32_t>(r.size()) != m) throw ContractError("ragged observation");
    for (const auto& z : r) {
      put<double>(out, z.real());
      put<double>(out, z.imag());
    }
  }
  if (!out) throw std::ios_base::failure("failed to write observation");
}

ObservationRecord read_observation(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ContractError("not an observation file");
  ObservationRecord rec;
  const auto arch = get<std::uint32_t>(in);
  if (arch > 2) throw ContractError("unknown architecture code " + std::to_string(arch));
  rec.architecture = static_cast<Architecture>(arch);
  rec.cfg.n_elements = static_cast<int>(get<std::uint32_t>(in));
  rec.cfg.n_symbols = static_cast<int>(get<std::uint32_t>(in));
  rec.observation.seed = get<std::uint64_t>(in);
  rec.cfg.spacing = get<double>(in);
  rec.cfg.speed = get<double>(in);
  rec.cfg.symbol_duration = get<double>(in);
  rec.scene.target_x = get<double>(in);
  rec.scene.target_y = get<double>(in);
  const double b_re = get<double>(in);
  const double b_im = get<double>(in);
  rec.scene.reflection = {b_re, b_im};
  rec.scene.noise_power = get<double>(in);
  rec.scene.tx_power = get<double>(in);
  rec.scene.wavelength = get<double>(in);
  rec.cfg.validate();
  rec.scene.validate();
  const auto m = get<std::uint32_t>(in);
  rec.observation.per_symbol.reserve(rec.cfg.n_symbols);
  for (int l = 0; l < rec.cfg.n_symbols; ++l) {
    Eigen::VectorXcd r(m);
    for (std::uint32_t i = 0; i < m; ++i) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      r[i] = {re, im};
    }
    rec.observation.per_symbol.push_back(std::move(r));
  }
  rec.observation.stacked = stack(rec.observation.per_symbol);
  return rec;
}

}  // namespace nfmove
