#include "nfmove/geometry.hpp"

#include <cmath>
#include <string>

#include "nfmove/errors.hpp"

namespace nfmove {

void ArrayConfig::validate() const {
  if (n_elements < 1) throw DomainError("n_elements must be >= 1");
  if (n_symbols < 1) throw DomainError("n_symbols must be >= 1");
  if (!(spacing > 0.0)) throw DomainError("spacing must be > 0");
  if (!(symbol_duration > 0.0)) throw DomainError("symbol_duration must be > 0");
  if (!(speed >= 0.0)) throw DomainError("speed must be >= 0");
}

void Scene::validate() const {
  if (!(noise_power > 0.0)) throw DomainError("noise_power must be > 0");
  if (!(tx_power > 0.0)) throw DomainError("tx_power must be > 0");
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be > 0");
  // x = 0 puts the target on the line of motion, where range and bearing
  // collapse into one coordinate.
  if (!(target_x > 0.0)) throw DomainError("target_x must be > 0");
  if (!std::isfinite(target_y)) throw DomainError("target_y must be finite");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::moving: return "moving";
    case Architecture::fixed: return "fixed";
    case Architecture::extended: return "extended";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "moving") return Architecture::moving;
  if (name == "fixed") return Architecture::fixed;
  if (name == "extended") return Architecture::extended;
  throw DomainError("unknown architecture '" + std::string(name) + "'");
}

ArrayTrack ArrayTrack::moving(const ArrayConfig& cfg) {
  cfg.validate();
  Eigen::MatrixXd rows(cfg.n_symbols, cfg.n_elements);
  for (int l = 0; l < cfg.n_symbols; ++l)
    for (int n = 0; n < cfg.n_elements; ++n) rows(l, n) = antenna_position(cfg, l, n);
  return ArrayTrack(std::move(rows), cfg.n_symbols, Architecture::moving);
}

ArrayTrack ArrayTrack::fixed(const ArrayConfig& cfg) {
  cfg.validate();
  Eigen::MatrixXd rows(1, cfg.n_elements);
  for (int n = 0; n < cfg.n_elements; ++n) rows(0, n) = antenna_position(cfg, 0, n);
  return ArrayTrack(std::move(rows), cfg.n_symbols, Architecture::fixed);
}

ArrayTrack ArrayTrack::extended(const ArrayConfig& cfg) {
  const auto positions = extended_array_positions(cfg);
  Eigen::MatrixXd rows(1, cfg.n_symbols);
  for (int l = 0; l < cfg.n_symbols; ++l) rows(0, l) = positions[l];
  return ArrayTrack(std::move(rows), cfg.n_symbols, Architecture::extended);
}

ArrayTrack ArrayTrack::make(const ArrayConfig& cfg, Architecture arch) {
  switch (arch) {
    case Architecture::moving: return moving(cfg);
    case Architecture::fixed: return fixed(cfg);
    case Architecture::extended: return extended(cfg);
  }
  throw DomainError("unknown architecture");
}

double ArrayTrack::position(int l, int n) const {
  if (l < 0 || l >= n_symbols_ || n < 0 || n >= n_elements())
    throw IndexError("track index out of range");
  return rows_(is_static() ? 0 : l, n);
}

Eigen::VectorXd ArrayTrack::row(int l) const {
  if (l < 0 || l >= n_symbols_) throw IndexError("symbol index out of range");
  return rows_.row(is_static() ? 0 : l).transpose();
}

double antenna_position(const ArrayConfig& cfg, int l, int n) {
  if (l < 0 || l >= cfg.n_symbols) throw IndexError("symbol index " + std::to_string(l) + " out of range");
  if (n < 0 || n >= cfg.n_elements) throw IndexError("element index " + std::to_string(n) + " out of range");
  return l * cfg.symbol_duration * cfg.speed + n * cfg.spacing;
}

DistanceField distance_field(const ArrayConfig& cfg, const Scene& scene) {
  cfg.validate();
  scene.validate();
  DistanceField field{Eigen::MatrixXd(cfg.n_symbols, cfg.n_elements),
                      Eigen::MatrixXd(cfg.n_symbols, cfg.n_elements)};
  for (int l = 0; l < cfg.n_symbols; ++l) {
    for (int n = 0; n < cfg.n_elements; ++n) {
      const double dy = scene.target_y - antenna_position(cfg, l, n);
      field.y_offsets(l, n) = dy;
      field.distances(l, n) = std::hypot(scene.target_x, dy);
    }
  }
  return field;
}

double platform_size(const ArrayConfig& cfg) {
  cfg.validate();
  return cfg.n_symbols * cfg.symbol_duration * cfg.speed;
}

double rayleigh_distance(double aperture, double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be > 0");
  if (!(aperture >= 0.0)) throw DomainError("aperture must be >= 0");
  return 2.0 * aperture * aperture / wavelength;
}

std::vector<double> extended_array_positions(const ArrayConfig& cfg) {
  cfg.validate();
  std::vector<double> positions(cfg.n_symbols);
  for (int l = 0; l < cfg.n_symbols; ++l) positions[l] = antenna_position(cfg, l, 0);
  return positions;
}

}  // namespace nfmove
