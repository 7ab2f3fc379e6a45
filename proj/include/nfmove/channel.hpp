#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nfmove/geometry.hpp"

namespace nfmove {

enum class Axis { x, y };

/// Spherical-wavefront response of a set of elements and its exact
/// derivatives with respect to the target coordinates.
struct SteeringBundle {
  Eigen::VectorXcd a;
  Eigen::VectorXcd da_dx;
  Eigen::VectorXcd da_dy;

  const Eigen::VectorXcd& derivative(Axis axis) const { return axis == Axis::x ? da_dx : da_dy; }
};

/// Round-trip response A = a a^T and its coordinate derivatives.
struct ResponsePair {
  Eigen::MatrixXcd A;
  Eigen::MatrixXcd dA_dx;
  Eigen::MatrixXcd dA_dy;
};

/// Entry n is lambda/(4 pi d_n) exp(-j 2 pi d_n / lambda), with d_n the
/// distance from (0, positions[n]) to (x, y). Derivatives follow from the
/// chain rule: da_n/dp = a_n (-1/d_n - j 2 pi/lambda) dd_n/dp.
SteeringBundle steering_at(const Eigen::VectorXd& positions, double x, double y, double wavelength);

/// Steering vector alone; cheaper than the bundle inside search loops.
Eigen::VectorXcd steering_vector_at(const Eigen::VectorXd& positions, double x, double y,
                                    double wavelength);

SteeringBundle steering_bundle(const ArrayTrack& track, const Scene& scene, int l);

/// Bundles for every symbol of the track (static tracks repeat one bundle).
std::vector<SteeringBundle> steering_sweep(const ArrayTrack& track, const Scene& scene);

// Moving-array convenience forms, symbol index l is 0-based.
Eigen::VectorXcd steering(const ArrayConfig& cfg, const Scene& scene, int l);
Eigen::VectorXcd steering_derivative(const ArrayConfig& cfg, const Scene& scene, int l, Axis axis);
ResponsePair response_pair(const ArrayConfig& cfg, const Scene& scene, int l);
ResponsePair response_pair(const SteeringBundle& bundle);

/// L-element steering of the extended fixed array, with derivatives.
SteeringBundle extended_steering(const ArrayConfig& cfg, const Scene& scene);

}  // namespace nfmove
