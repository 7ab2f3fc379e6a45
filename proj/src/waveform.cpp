#include "nfmove/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nfmove/channel.hpp"
#include "nfmove/errors.hpp"
#include "nfmove/rng.hpp"

namespace nfmove {

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::sem ? "sem" : "isotropic";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "sem") return Scheme::sem;
  if (name == "isotropic" || name == "iso") return Scheme::isotropic;
  throw DomainError("unknown scheme '" + std::string(name) + "'");
}

CovarianceSpec CovarianceSpec::dense(Eigen::MatrixXcd R, Scheme scheme) {
  if (R.rows() != R.cols()) throw ContractError("covariance must be square");
  CovarianceSpec spec(Kind::dense, static_cast<int>(R.rows()), scheme);
  spec.dense_ = std::move(R);
  return spec;
}

CovarianceSpec CovarianceSpec::scaled_identity(int dim, double scale, Scheme scheme) {
  if (dim < 1) throw ContractError("covariance dimension must be >= 1");
  CovarianceSpec spec(Kind::scaled_identity, dim, scheme);
  spec.scale_ = scale;
  return spec;
}

CovarianceSpec CovarianceSpec::rank_one(Eigen::VectorXcd v, Scheme scheme) {
  if (v.size() < 1) throw ContractError("covariance dimension must be >= 1");
  CovarianceSpec spec(Kind::rank_one, static_cast<int>(v.size()), scheme);
  spec.factor_ = std::move(v);
  return spec;
}

Eigen::MatrixXcd CovarianceSpec::matrix() const {
  switch (kind_) {
    case Kind::dense: return dense_;
    case Kind::scaled_identity: return Eigen::MatrixXcd::Identity(dim_, dim_) * scale_;
    case Kind::rank_one: return factor_ * factor_.adjoint();
  }
  return {};
}

Eigen::VectorXcd CovarianceSpec::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != dim_) throw ContractError("covariance/vector dimension mismatch");
  switch (kind_) {
    case Kind::dense: return dense_ * x;
    case Kind::scaled_identity: return scale_ * x;
    case Kind::rank_one: return factor_ * factor_.dot(x);
  }
  return {};
}

double CovarianceSpec::trace() const {
  switch (kind_) {
    case Kind::dense: return dense_.trace().real();
    case Kind::scaled_identity: return scale_ * dim_;
    case Kind::rank_one: return factor_.squaredNorm();
  }
  return 0.0;
}

WaveformSet sem_waveforms(const ArrayTrack& track, const Scene& scene) {
  scene.validate();
  WaveformSet ws{{}, Scheme::sem, track.architecture()};
  ws.symbols.reserve(track.n_symbols());
  const double amplitude = std::sqrt(scene.tx_power);
  if (track.is_static()) {
    const Eigen::VectorXcd a = steering_vector_at(track.row(0), scene.target_x, scene.target_y, scene.wavelength);
    ws.symbols.assign(track.n_symbols(), (amplitude / a.norm()) * a.conjugate());
    return ws;
  }
  for (int l = 0; l < track.n_symbols(); ++l) {
    const Eigen::VectorXcd a = steering_vector_at(track.row(l), scene.target_x, scene.target_y, scene.wavelength);
    ws.symbols.push_back((amplitude / a.norm()) * a.conjugate());
  }
  return ws;
}

WaveformSet iso_waveforms(const ArrayTrack& track, const Scene& scene, std::uint64_t seed) {
  scene.validate();
  WaveformSet ws{{}, Scheme::isotropic, track.architecture()};
  const int n = track.n_elements();
  const double variance = scene.tx_power / n;
  ws.symbols.reserve(track.n_symbols());
  for (int l = 0; l < track.n_symbols(); ++l) {
    GaussianStream stream(seed, StreamDomain::waveform, static_cast<std::uint64_t>(l));
    Eigen::VectorXcd s(n);
    for (int i = 0; i < n; ++i) s[i] = stream.cscg(variance);
    ws.symbols.push_back(std::move(s));
  }
  return ws;
}

WaveformSet sem_moving(const ArrayConfig& cfg, const Scene& scene) {
  return sem_waveforms(ArrayTrack::moving(cfg), scene);
}

WaveformSet iso_moving(const ArrayConfig& cfg, const Scene& scene, std::uint64_t seed) {
  return iso_waveforms(ArrayTrack::moving(cfg), scene, seed);
}

namespace {

CovarianceSpec sem_static(const ArrayTrack& track, const Scene& scene) {
  scene.validate();
  const Eigen::VectorXcd a = steering_vector_at(track.row(0), scene.target_x, scene.target_y, scene.wavelength);
  return CovarianceSpec::rank_one((std::sqrt(scene.tx_power) / a.norm()) * a.conjugate(), Scheme::sem);
}

}  // namespace

CovarianceSpec sem_fixed(const ArrayConfig& cfg, const Scene& scene) {
  return sem_static(ArrayTrack::fixed(cfg), scene);
}

CovarianceSpec sem_extended(const ArrayConfig& cfg, const Scene& scene) {
  return sem_static(ArrayTrack::extended(cfg), scene);
}

CovarianceSpec iso_fixed(const ArrayConfig& cfg, const Scene& scene) {
  cfg.validate();
  scene.validate();
  return CovarianceSpec::scaled_identity(cfg.n_elements, scene.tx_power / cfg.n_elements, Scheme::isotropic);
}

CovarianceSpec iso_extended(const ArrayConfig& cfg, const Scene& scene) {
  cfg.validate();
  scene.validate();
  return CovarianceSpec::scaled_identity(cfg.n_symbols, scene.tx_power / cfg.n_symbols, Scheme::isotropic);
}

CovarianceSpec sample_covariance(const WaveformSet& ws) {
  if (ws.symbols.empty()) throw ContractError("sample covariance of an empty waveform set");
  const Eigen::Index n = ws.symbols.front().size();
  for (const auto& s : ws.symbols)
    if (s.size() != n) throw ContractError("waveform symbols differ in dimension");

  std::vector<std::size_t> order(ws.symbols.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto less = [&](std::size_t i, std::size_t j) {
    const auto& u = ws.symbols[i];
    const auto& v = ws.symbols[j];
    for (Eigen::Index k = 0; k < n; ++k) {
      if (u[k].real() != v[k].real()) return u[k].real() < v[k].real();
      if (u[k].imag() != v[k].imag()) return u[k].imag() < v[k].imag();
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);

  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i : order) R.noalias() += ws.symbols[i] * ws.symbols[i].adjoint();
  R /= static_cast<double>(ws.symbols.size());
  return CovarianceSpec::dense(std::move(R), ws.scheme);
}

}  // namespace nfmove
