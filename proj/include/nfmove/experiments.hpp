#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nfmove/crb.hpp"
#include "nfmove/estimate.hpp"
#include "nfmove/geometry.hpp"
#include "nfmove/waveform.hpp"

namespace nfmove {

inline constexpr std::string_view kToolVersion = "nfmove 0.1.0";

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

enum class SweepAxis { power, symbols, antennas };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

/// Everything a run needs. Defaults reproduce the reference scenario.
struct ExperimentConfig {
  ArrayConfig array;
  Scene scene;
  std::vector<Scheme> schemes{Scheme::sem, Scheme::isotropic};
  std::vector<Architecture> architectures{Architecture::moving, Architecture::fixed, Architecture::extended};
  SweepAxis axis = SweepAxis::power;
  std::vector<double> values;  // empty: default grid of the axis
  std::uint64_t seed = 1;
  std::string out;             // empty: stdout
  int trials = 100;
  int realizations = 10;
  Region region;
  double resolution = 0.04;

  /// Applies one `key = value` setting. Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  /// Re-checks every embedded invariant. Throws ConfigError.
  void validate() const;
  /// Resolved settings as `key = value` lines, loadable by parse_config.
  std::vector<std::string> describe() const;
};

/// Flat key-value text: `key = value`, `#` comments, blank lines ignored.
/// Unknown keys are rejected with the offending line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config_file(const std::string& path);

std::vector<double> default_sweep_values(SweepAxis axis);

struct SweepRow {
  double axis_value = 0.0;
  Architecture architecture = Architecture::moving;
  Scheme scheme = Scheme::sem;
  std::optional<CrbReport> report;  // empty when the point failed
  int realizations = 0;             // > 0 only for isotropic moving rows
  double crb_mean = 0.0;
  double crb_std = 0.0;
  std::string error;
};

/// One row per (value, architecture, scheme), in that nesting order.
/// Isotropic moving rows average `realizations` waveform draws.
std::vector<SweepRow> run_crb_sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values);

struct RatioCheckRow {
  double distance_multiple = 0.0;
  double target_x = 0.0;
  double target_y = 0.0;
  double crb_moving = 0.0;
  double crb_extended = 0.0;
  double ratio = 0.0;          // exact bounds
  double ratio_approx = 0.0;   // distance-only closed forms
  double l2_over_4n2 = 0.0;
  double l2_over_4n = 0.0;

  double deviation_4n2() const { return std::abs(ratio / l2_over_4n2 - 1.0); }
  double deviation_4n() const { return std::abs(ratio / l2_over_4n - 1.0); }
};

/// SEM moving/extended bound ratio with the target at multiples of the
/// platform size, on the platform's perpendicular bisector.
std::vector<RatioCheckRow> run_ratio_check(const ExperimentConfig& cfg, const std::vector<double>& multiples);

struct MapRun {
  LikelihoodMap map;
  EstimateResult refined;
};

/// One seeded noise realization for the architecture, searched over the
/// configured region. Uses the first configured scheme.
MapRun run_likelihood_map(const ExperimentConfig& cfg, Architecture arch);

MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg);

struct GeometryReport {
  double platform_size = 0.0;
  double conventional_aperture = 0.0;  // N delta
  double rayleigh_conventional = 0.0;
  double rayleigh_extended = 0.0;
};
GeometryReport geometry_report(const ExperimentConfig& cfg);

// CSV writers. Each starts with a `#` preamble holding the tool version, the
// command, and every resolved setting.
void write_preamble(std::ostream& out, const ExperimentConfig& cfg, std::string_view command);
void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);
void write_ratio_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<RatioCheckRow>& rows);
void write_monte_carlo_csv(std::ostream& out, const ExperimentConfig& cfg, const MonteCarloResult& result);
void write_likelihood_csv(std::ostream& out, const ExperimentConfig& cfg, Architecture arch, const MapRun& run);

std::string summarize(const MapRun& run, Architecture arch);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view text);

}  // namespace nfmove
