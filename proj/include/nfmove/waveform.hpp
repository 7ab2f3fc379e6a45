#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nfmove/geometry.hpp"

namespace nfmove {

enum class Scheme { sem, isotropic };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// Transmit symbols s_0..s_{L-1}, one complex vector per symbol.
struct WaveformSet {
  std::vector<Eigen::VectorXcd> symbols;
  Scheme scheme = Scheme::sem;
  Architecture architecture = Architecture::moving;

  int n_symbols() const { return static_cast<int>(symbols.size()); }
  int n_elements() const { return symbols.empty() ? 0 : static_cast<int>(symbols.front().size()); }
};

/// Hermitian transmit covariance. Structured forms (scaled identity,
/// rank one) are kept factored so that L x L covariances of the extended
/// array never need to be materialized.
class CovarianceSpec {
 public:
  enum class Kind { dense, scaled_identity, rank_one };

  static CovarianceSpec dense(Eigen::MatrixXcd R, Scheme scheme);
  static CovarianceSpec scaled_identity(int dim, double scale, Scheme scheme);
  /// R = v v^H.
  static CovarianceSpec rank_one(Eigen::VectorXcd v, Scheme scheme);

  Kind kind() const { return kind_; }
  Scheme scheme() const { return scheme_; }
  int dim() const { return dim_; }

  Eigen::MatrixXcd matrix() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  double trace() const;

  /// v for rank_one, the scale for scaled_identity.
  const Eigen::VectorXcd& factor() const { return factor_; }
  double scale() const { return scale_; }

 private:
  CovarianceSpec(Kind kind, int dim, Scheme scheme) : kind_(kind), dim_(dim), scheme_(scheme) {}

  Kind kind_;
  int dim_;
  Scheme scheme_;
  Eigen::MatrixXcd dense_;
  Eigen::VectorXcd factor_;
  double scale_ = 0.0;
};

/// Strongest-eigenmode symbols for any track: s_l = sqrt(P0) a_l^* / |a_l|.
WaveformSet sem_waveforms(const ArrayTrack& track, const Scene& scene);

/// i.i.d. CN(0, (P0/N) I) symbols; symbol l uses substream (seed, waveform, l).
WaveformSet iso_waveforms(const ArrayTrack& track, const Scene& scene, std::uint64_t seed);

WaveformSet sem_moving(const ArrayConfig& cfg, const Scene& scene);
WaveformSet iso_moving(const ArrayConfig& cfg, const Scene& scene, std::uint64_t seed);

CovarianceSpec sem_fixed(const ArrayConfig& cfg, const Scene& scene);
CovarianceSpec sem_extended(const ArrayConfig& cfg, const Scene& scene);
CovarianceSpec iso_fixed(const ArrayConfig& cfg, const Scene& scene);
CovarianceSpec iso_extended(const ArrayConfig& cfg, const Scene& scene);

/// (1/L) sum_l s_l s_l^H. Accumulation runs over the symbols in a canonical
/// (lexicographic) order, so the result is bitwise a function of the symbol
/// multiset and does not change when symbols are permuted.
CovarianceSpec sample_covariance(const WaveformSet& ws);

}  // namespace nfmove
