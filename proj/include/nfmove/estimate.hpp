#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "nfmove/geometry.hpp"
#include "nfmove/simulate.hpp"
#include "nfmove/waveform.hpp"

namespace nfmove {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Region {
  double x_min = 5.0;
  double x_max = 15.0;
  double y_min = -5.0;
  double y_max = 5.0;
};

/// Residual floor inside the logarithm; keeps noiseless objectives finite.
inline constexpr double kResidualFloor = 1e-30;

/// Concentrated log-likelihood of one observation, with the reflection
/// coefficient profiled out:
///   f(x,y) = -LN (ln(pi/LN) + 1 + ln sum_l |r_l - b~ a_l a_l^T s_l|^2).
///
/// Construction does the hypothesis-independent work. For static arrays the
/// symbols are folded into sufficient statistics; for moving arrays element
/// positions shared between symbols are evaluated once per hypothesis.
class ConcentratedLikelihood {
 public:
  struct Value {
    double loglik = 0.0;
    std::complex<double> reflection;
    double residual = 0.0;
  };

  ConcentratedLikelihood(const ArrayTrack& track, double wavelength, const WaveformSet& ws,
                         const Observation& obs);

  /// Throws DegenerateHypothesisError when no signal projects onto the
  /// hypothesis, DomainError for x <= 0.
  Value evaluate(Point h) const;

  int samples() const { return samples_; }

 private:
  struct Projection {
    std::complex<double> numerator;  // sum conj(a^T s) a^H r
    double denominator = 0.0;        // sum |a^T s|^2 |a|^2
  };
  Projection project_static(const Eigen::VectorXcd& a) const;
  Projection project_moving(Point h) const;

  ArrayTrack track_;
  double wavelength_;
  double energy_ = 0.0;
  int samples_ = 0;

  // static arrays
  bool rank_one_ = false;
  Eigen::VectorXcd waveform_;   // shared symbol when rank_one_
  Eigen::VectorXcd r_sum_;      // sum_l r_l
  Eigen::MatrixXcd cross_;      // sum_l r_l s_l^H
  Eigen::MatrixXcd gram_;       // sum_l s_l s_l^H

  // moving arrays
  Eigen::VectorXd unique_positions_;
  std::vector<int> position_index_;  // L*N, row-major
  std::vector<double> symbols_re_, symbols_im_;
  std::vector<double> received_re_, received_im_;
};

std::complex<double> b_tilde(const ArrayTrack& track, double wavelength, Point h, const WaveformSet& ws,
                             const Observation& obs);

double concentrated_loglik(const ArrayTrack& track, double wavelength, const WaveformSet& ws,
                           const Observation& obs, Point h);

/// Gaussian log-density ln f(r) at the scene's (x, y, b, sigma^2).
double full_loglik(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws, const Observation& obs);

struct LikelihoodMap {
  std::vector<double> x_grid;
  std::vector<double> y_grid;
  Eigen::MatrixXd values;  // values(i, j) at (x_grid[i], y_grid[j])
  Point argmax;
  std::complex<double> b_at_argmax;
  double max_value = 0.0;
};

/// Uniform axis lo, lo + step, ... up to hi (inclusive within 1e-9 steps).
std::vector<double> uniform_axis(double lo, double hi, double step);

/// Exhaustive search. Ties go to the smallest x, then the smallest y.
LikelihoodMap grid_search(const ConcentratedLikelihood& objective, const Region& region, double resolution);
LikelihoodMap grid_search(const ArrayTrack& track, double wavelength, const WaveformSet& ws,
                          const Observation& obs, const Region& region, double resolution);

struct EstimateResult {
  Point position;
  std::complex<double> reflection;
  double objective = 0.0;
  bool refined = false;  // true when the pattern search moved off the grid argmax
};

inline constexpr double kRefineMinStep = 1e-4;

/// Pattern search from the grid argmax. Polls +-step along two directions,
/// accepts only strict improvements and halves the step from one grid cell
/// down to kRefineMinStep. When a step stalls, the directions are rotated to
/// the principal axes of a finite-difference curvature estimate and a
/// quadratic-model step is tried. Probes outside the map's grid extent are
/// skipped.
EstimateResult refine(const LikelihoodMap& map, const ConcentratedLikelihood& objective);

void write_map_csv(std::ostream& out, const LikelihoodMap& map);

struct SearchOptions {
  Architecture architecture = Architecture::moving;
  Region region;
  double resolution = 0.04;
  NoiseMode noise = NoiseMode::enabled;
};

struct TrialEstimate {
  int trial = 0;
  std::uint64_t seed = 0;
  Point estimate;
  double error = 0.0;  // m, Euclidean
};

struct MonteCarloResult {
  double rmse = 0.0;      // m
  double crb_rmse = 0.0;  // m, sqrt of the bound for the same waveform
  std::vector<TrialEstimate> trials;
};

/// Independent noise realizations with per-trial seeds derived from `seed`;
/// each trial runs grid_search + refine. Isotropic waveforms are drawn once
/// from `seed` and shared by all trials.
MonteCarloResult monte_carlo_rmse(const ArrayConfig& cfg, const Scene& scene, Scheme scheme, int trials,
                                  std::uint64_t seed, const SearchOptions& options = {});

}  // namespace nfmove
