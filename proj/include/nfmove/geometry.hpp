#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nfmove {

// Indexing convention used throughout the library: symbols l and elements n
// are 0-based, so l in [0, L) and n in [0, N). Symbol 0, element 0 sits at
// the origin.

/// Moving-platform ULA. Defaults are the reference scenario (16 elements at
/// half a 6 GHz wavelength, 5 m/s, 1000 symbols of 1 ms).
struct ArrayConfig {
  int n_elements = 16;
  double spacing = 0.025;          // m
  double speed = 5.0;              // m/s
  double symbol_duration = 1e-3;   // s
  int n_symbols = 1000;

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// Target and link budget. Powers are in watts.
struct Scene {
  double target_x = 10.0;
  double target_y = 0.0;
  std::complex<double> reflection{1.0, 0.0};
  double noise_power = 1e-10;  // -70 dBm
  double tx_power = 1.0;       // 30 dBm
  double wavelength = 0.05;

  void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

enum class Architecture { moving, fixed, extended };

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view name);

/// Element positions (along the y axis) for every symbol of an observation.
///
/// A moving track stores one row per symbol. Static tracks (the conventional
/// fixed array and the extended fixed array) store a single row shared by all
/// symbols, so an L-element extended array over L symbols costs O(L) memory.
class ArrayTrack {
 public:
  static ArrayTrack moving(const ArrayConfig& cfg);
  /// N elements frozen at their symbol-0 positions.
  static ArrayTrack fixed(const ArrayConfig& cfg);
  /// L elements at the positions element 0 visits over the pass.
  static ArrayTrack extended(const ArrayConfig& cfg);
  static ArrayTrack make(const ArrayConfig& cfg, Architecture arch);

  int n_symbols() const { return n_symbols_; }
  int n_elements() const { return static_cast<int>(rows_.cols()); }
  bool is_static() const { return rows_.rows() == 1; }
  Architecture architecture() const { return arch_; }

  double position(int l, int n) const;
  /// Positions of all elements at symbol l.
  Eigen::VectorXd row(int l) const;

 private:
  ArrayTrack(Eigen::MatrixXd rows, int n_symbols, Architecture arch)
      : rows_(std::move(rows)), n_symbols_(n_symbols), arch_(arch) {}

  Eigen::MatrixXd rows_;  // 1 x N when static, L x N otherwise
  int n_symbols_;
  Architecture arch_;
};

struct DistanceField {
  Eigen::MatrixXd distances;  // L x N
  Eigen::MatrixXd y_offsets;  // L x N, target_y minus element position
};

/// Position of element n at symbol l: l*T_s*v + n*delta.
double antenna_position(const ArrayConfig& cfg, int l, int n);

DistanceField distance_field(const ArrayConfig& cfg, const Scene& scene);

/// Distance swept by the platform over the pass, L*T_s*v.
double platform_size(const ArrayConfig& cfg);

/// Fraunhofer distance 2*D^2/lambda.
double rayleigh_distance(double aperture, double wavelength);

std::vector<double> extended_array_positions(const ArrayConfig& cfg);

}  // namespace nfmove
