#pragma once

#include <complex>

#include <Eigen/Dense>

#include "nfmove/geometry.hpp"
#include "nfmove/waveform.hpp"

namespace nfmove {

/// Fisher information over (x, y, Re b, Im b).
struct Fim {
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();
};

/// Schur-complement terms of the position block. g_xx and g_yy are real by
/// construction; only Re{g_xy} enters the bound. alpha is
/// Re{g_xy}^2 / (g_xx g_yy), NaN when g_xx * g_yy is not positive.
struct GTerms {
  double g_xx = 0.0;
  double g_yy = 0.0;
  std::complex<double> g_xy{0.0, 0.0};
  double alpha = 0.0;
};

struct CrbReport {
  double crb_position = 0.0;  // m^2, var(x) + var(y) lower bound
  GTerms gterms;
  Architecture architecture = Architecture::moving;
  Scheme scheme = Scheme::sem;

  /// sqrt of the bound, in meters.
  double rmse_lower_bound() const;
};

/// Threshold on the equilibrated condition number above which the FIM is
/// treated as singular.
inline constexpr double kFimConditionLimit = 1e12;

/// FIM of an arbitrary track and waveform set (one symbol per track row).
Fim fim(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws);
Fim fim_moving(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws);

/// Condition number of D^{-1/2} F D^{-1/2}, D = diag(F). Scale-free, since
/// the position and reflection parameters carry different units.
double fim_condition(const Fim& F);

/// Trace of the leading 2x2 block of F^{-1}, via the Schur complement of the
/// reflection block. Throws SingularFimError above kFimConditionLimit.
double crb_from_fim(const Fim& F);

/// Same quantity from a pivoted LU inverse of the equilibrated 4x4 matrix.
double crb_from_fim_full_inverse(const Fim& F);

GTerms gterms(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws);

/// Closed-form bound for a waveform sequence on any track:
/// sigma^2/(2|b|^2) (G_xx + G_yy)/(G_xx G_yy - Re{G_xy}^2).
CrbReport crb_closed(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws);
CrbReport crb_moving_closed(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws);

/// G-terms of a static array driven by transmit covariance R.
GTerms gterms_static(const ArrayTrack& track, const Scene& scene, const CovarianceSpec& R);

/// Static-array bound sigma^2/(2|b|^2 L) (...) for covariance R over L symbols.
CrbReport crb_static(const ArrayTrack& track, const Scene& scene, const CovarianceSpec& R);
CrbReport crb_fixed(const ArrayConfig& cfg, const Scene& scene, const CovarianceSpec& R);
CrbReport crb_extended(const ArrayConfig& cfg, const Scene& scene, const CovarianceSpec& R_hat);

/// SEM G-terms of the moving array from the per-symbol vector quantities
/// |a_l|^2, a_l^H da_l and da_l^H da_l (no waveforms built).
GTerms gterms_moving_sem_vector_form(const ArrayConfig& cfg, const Scene& scene);

/// Distance-only SEM G-terms under the far-from-array approximation
/// d_{l,n} ~ d_l (pair sums over elements, or over symbols for the
/// extended and moving arrays).
GTerms gterms_sem_approx(const ArrayConfig& cfg, const Scene& scene, Architecture arch);

/// Approximate SEM bound from gterms_sem_approx. Throws
/// DegenerateGeometryError when G_xx or G_yy vanishes.
CrbReport crb_sem_approx(const ArrayConfig& cfg, const Scene& scene, Architecture arch);

/// Large-distance ratio of moving to extended SEM bounds, L^2 / (4 N^2).
double asymptotic_ratio(const ArrayConfig& cfg);

/// Convenience: the reference SEM/isotropic bound for an architecture.
/// Isotropic moving uses one waveform realization drawn from `seed`.
CrbReport crb_for(const ArrayConfig& cfg, const Scene& scene, Architecture arch, Scheme scheme,
                  std::uint64_t seed = 0);

}  // namespace nfmove
