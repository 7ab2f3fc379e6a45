#include "nfmove/channel.hpp"

#include <cmath>
#include <numbers>

namespace nfmove {

namespace {

std::complex<double> spherical_entry(double distance, double wavelength) {
  const double amplitude = wavelength / (4.0 * std::numbers::pi * distance);
  return std::polar(amplitude, -2.0 * std::numbers::pi * distance / wavelength);
}

SteeringBundle moving_bundle(const ArrayConfig& cfg, const Scene& scene, int l) {
  cfg.validate();
  scene.validate();
  Eigen::VectorXd positions(cfg.n_elements);
  for (int n = 0; n < cfg.n_elements; ++n) positions[n] = antenna_position(cfg, l, n);
  return steering_at(positions, scene.target_x, scene.target_y, scene.wavelength);
}

}  // namespace

SteeringBundle steering_at(const Eigen::VectorXd& positions, double x, double y, double wavelength) {
  const Eigen::Index n = positions.size();
  const double wavenumber = 2.0 * std::numbers::pi / wavelength;
  SteeringBundle bundle{Eigen::VectorXcd(n), Eigen::VectorXcd(n), Eigen::VectorXcd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dy = y - positions[i];
    const double d = std::hypot(x, dy);
    const std::complex<double> a = spherical_entry(d, wavelength);
    const std::complex<double> radial = a * std::complex<double>(-1.0 / d, -wavenumber);
    bundle.a[i] = a;
    bundle.da_dx[i] = radial * (x / d);
    bundle.da_dy[i] = radial * (dy / d);
  }
  return bundle;
}

Eigen::VectorXcd steering_vector_at(const Eigen::VectorXd& positions, double x, double y,
                                    double wavelength) {
  Eigen::VectorXcd a(positions.size());
  for (Eigen::Index i = 0; i < positions.size(); ++i)
    a[i] = spherical_entry(std::hypot(x, y - positions[i]), wavelength);
  return a;
}

SteeringBundle steering_bundle(const ArrayTrack& track, const Scene& scene, int l) {
  scene.validate();
  return steering_at(track.row(l), scene.target_x, scene.target_y, scene.wavelength);
}

std::vector<SteeringBundle> steering_sweep(const ArrayTrack& track, const Scene& scene) {
  scene.validate();
  std::vector<SteeringBundle> out;
  out.reserve(track.n_symbols());
  if (track.is_static()) {
    const SteeringBundle shared = steering_bundle(track, scene, 0);
    out.assign(track.n_symbols(), shared);
    return out;
  }
  for (int l = 0; l < track.n_symbols(); ++l) out.push_back(steering_bundle(track, scene, l));
  return out;
}

Eigen::VectorXcd steering(const ArrayConfig& cfg, const Scene& scene, int l) {
  return moving_bundle(cfg, scene, l).a;
}

Eigen::VectorXcd steering_derivative(const ArrayConfig& cfg, const Scene& scene, int l, Axis axis) {
  return moving_bundle(cfg, scene, l).derivative(axis);
}

ResponsePair response_pair(const SteeringBundle& b) {
  ResponsePair pair;
  pair.A = b.a * b.a.transpose();
  pair.dA_dx = b.da_dx * b.a.transpose() + b.a * b.da_dx.transpose();
  pair.dA_dy = b.da_dy * b.a.transpose() + b.a * b.da_dy.transpose();
  return pair;
}

ResponsePair response_pair(const ArrayConfig& cfg, const Scene& scene, int l) {
  return response_pair(moving_bundle(cfg, scene, l));
}

SteeringBundle extended_steering(const ArrayConfig& cfg, const Scene& scene) {
  return steering_bundle(ArrayTrack::extended(cfg), scene, 0);
}

}  // namespace nfmove
