#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nfmove/channel.hpp"
#include "nfmove/geometry.hpp"
#include "oracles.hpp"

using namespace nfmove;

namespace {

double rel_err(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want) {
  return (got - want).norm() / want.norm();
}

}  // namespace

TEST(Steering, MagnitudeAtTenMeters) {
  const auto a = steering(ArrayConfig{}, Scene{}, 0);
  EXPECT_NEAR(std::abs(a[0]), 0.05 / (40.0 * std::numbers::pi), 1e-12 * 3.97887e-4);
  EXPECT_NEAR(std::abs(a[0]), 3.97887e-4, 1e-9);
}

TEST(Steering, IntegerWavelengthDistanceIsRealPositive) {
  // d = 10 m = 200 wavelengths
  const auto a = steering(ArrayConfig{}, Scene{}, 0);
  EXPECT_GT(a[0].real(), 0.0);
  EXPECT_LE(std::abs(a[0].imag()), 1e-9 * a[0].real());
}

TEST(Steering, MagnitudesMatchGeometry) {
  const ArrayConfig cfg;
  const Scene scene;
  const auto f = distance_field(cfg, scene);
  for (int l : {0, 1, 500, 999}) {
    const auto a = steering(cfg, scene, l);
    for (int n = 0; n < cfg.n_elements; ++n) {
      const double want = scene.wavelength / (4.0 * std::numbers::pi * f.distances(l, n));
      EXPECT_NEAR(std::abs(a[n]), want, 1e-12 * want);
    }
  }
}

TEST(Steering, MatchesLongDoubleModel) {
  const ArrayConfig cfg;
  const Scene scene;
  const auto track = ArrayTrack::moving(cfg);
  for (int l : {0, 123, 999}) {
    const auto a = steering(cfg, scene, l);
    for (int n = 0; n < cfg.n_elements; ++n) {
      const auto want = oracle::steering_entry(track.position(l, n), scene.target_x, scene.target_y, scene.wavelength);
      EXPECT_NEAR(a[n].real(), static_cast<double>(want.real()), 1e-12 * std::abs(a[n]));
      EXPECT_NEAR(a[n].imag(), static_cast<double>(want.imag()), 1e-12 * std::abs(a[n]));
    }
  }
}

TEST(SteeringDerivative, BroadsideYDerivativeIsZero) {
  // element 0 at symbol 0 sits at y = 0, the target's own y
  const auto dy = steering_derivative(ArrayConfig{}, Scene{}, 0, Axis::y);
  EXPECT_EQ(dy[0], std::complex<double>(0.0, 0.0));
}

TEST(SteeringDerivative, MatchesFiniteDifferencesEverywhere) {
  const ArrayConfig cfg;
  const Scene scene;
  const auto track = ArrayTrack::moving(cfg);
  double worst = 0.0;
  for (int l = 0; l < cfg.n_symbols; ++l) {
    const auto b = steering_bundle(track, scene, l);
    const Eigen::VectorXd pos = track.row(l);
    for (Axis axis : {Axis::x, Axis::y}) {
      const auto fd = oracle::steering_fd(pos, scene.target_x, scene.target_y, scene.wavelength, axis, 1e-5);
      for (int n = 0; n < cfg.n_elements; ++n) {
        const auto exact = b.derivative(axis)[n];
        if (std::abs(exact) == 0.0) {
          EXPECT_LT(std::abs(fd[n]), 1e-12);
          continue;
        }
        worst = std::max(worst, std::abs(exact - fd[n]) / std::abs(exact));
      }
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(SteeringDerivative, PhaseTermDominates) {
  const ArrayConfig cfg;
  const Scene scene;
  const auto a = steering(cfg, scene, 0);
  const auto dx = steering_derivative(cfg, scene, 0, Axis::x);
  const auto f = distance_field(cfg, scene);
  const double k = 2.0 * std::numbers::pi / scene.wavelength;
  for (int n = 0; n < cfg.n_elements; ++n) {
    const double want = std::abs(a[n]) * k * scene.target_x / f.distances(0, n);
    EXPECT_NEAR(std::abs(dx[n]), want, 2e-3 * want);
  }
}

TEST(ResponsePair, ScalarCase) {
  ArrayConfig cfg;
  cfg.n_elements = 1;
  const Scene scene;
  const auto p = response_pair(cfg, scene, 3);
  const auto a = steering(cfg, scene, 3)[0];
  const auto ax = steering_derivative(cfg, scene, 3, Axis::x)[0];
  ASSERT_EQ(p.A.rows(), 1);
  EXPECT_EQ(p.A(0, 0), a * a);
  EXPECT_NEAR(std::abs(p.dA_dx(0, 0) - 2.0 * a * ax), 0.0, 1e-15 * std::abs(a * ax));
}

TEST(ResponsePair, ComplexSymmetric) {
  std::mt19937_64 rng(7);
  const auto rs = oracle::random_scene(rng);
  for (int l : {0, rs.cfg.n_symbols - 1}) {
    const auto p = response_pair(rs.cfg, rs.scene, l);
    EXPECT_EQ((p.A - p.A.transpose()).norm(), 0.0);
    EXPECT_EQ((p.dA_dx - p.dA_dx.transpose()).norm(), 0.0);
    EXPECT_EQ((p.dA_dy - p.dA_dy.transpose()).norm(), 0.0);
  }
}

TEST(ResponsePair, DerivativeMatchesFiniteDifference) {
  const ArrayConfig cfg;
  // A carries twice the phase of a, so the step is smaller than for a
  const double h = 1e-6;
  for (Axis axis : {Axis::x, Axis::y}) {
    Scene plus, minus;
    plus.target_y = minus.target_y = 0.7;
    (axis == Axis::x ? plus.target_x : plus.target_y) += h;
    (axis == Axis::x ? minus.target_x : minus.target_y) -= h;
    Scene mid;
    mid.target_y = 0.7;
    const auto p = response_pair(cfg, mid, 42);
    const Eigen::MatrixXcd fd = (response_pair(cfg, plus, 42).A - response_pair(cfg, minus, 42).A) / (2.0 * h);
    const auto& exact = axis == Axis::x ? p.dA_dx : p.dA_dy;
    EXPECT_LE((exact - fd).norm() / exact.norm(), 1e-6);
  }
}

TEST(ExtendedSteering, SingleSymbolMatchesElementZero) {
  ArrayConfig cfg;
  cfg.n_symbols = 1;
  const Scene scene;
  const auto ext = extended_steering(cfg, scene);
  ASSERT_EQ(ext.a.size(), 1);
  EXPECT_EQ(ext.a[0], steering(cfg, scene, 0)[0]);
}

TEST(ExtendedSteering, MagnitudesFromPositions) {
  const ArrayConfig cfg;
  const Scene scene;
  const auto ext = extended_steering(cfg, scene);
  const auto pos = extended_array_positions(cfg);
  ASSERT_EQ(ext.a.size(), 1000);
  for (int l = 0; l < cfg.n_symbols; ++l) {
    const double d = std::hypot(scene.target_x, scene.target_y - pos[l]);
    const double want = scene.wavelength / (4.0 * std::numbers::pi * d);
    EXPECT_NEAR(std::abs(ext.a[l]), want, 1e-12 * want);
  }
}

TEST(ExtendedSteering, SymmetricEndpoints) {
  ArrayConfig cfg;
  cfg.n_elements = 1;
  Scene scene;
  // midpoint of the extended aperture, (L - 1) T_s v / 2
  scene.target_y = extended_array_positions(cfg).back() / 2.0;
  const auto ext = extended_steering(cfg, scene);
  EXPECT_NEAR(std::abs(ext.a[0]), std::abs(ext.a[cfg.n_symbols - 1]), 1e-15);
}

TEST(ExtendedSteering, DerivativesMatchFiniteDifferences) {
  const ArrayConfig cfg;
  Scene scene;
  scene.target_y = 1.3;
  const auto ext = extended_steering(cfg, scene);
  Eigen::VectorXd pos(cfg.n_symbols);
  const auto p = extended_array_positions(cfg);
  for (int l = 0; l < cfg.n_symbols; ++l) pos[l] = p[l];
  EXPECT_LE(rel_err(ext.da_dx, oracle::steering_fd(pos, scene.target_x, scene.target_y, scene.wavelength, Axis::x, 1e-5)),
            1e-6);
  EXPECT_LE(rel_err(ext.da_dy, oracle::steering_fd(pos, scene.target_x, scene.target_y, scene.wavelength, Axis::y, 1e-5)),
            1e-6);
}
