#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nfmove/channel.hpp"
#include "nfmove/errors.hpp"
#include "nfmove/simulate.hpp"

using namespace nfmove;

TEST(Synthesize, NoiselessIsRankOneResponse) {
  const ArrayConfig cfg;
  Scene scene;
  scene.reflection = {0.6, -0.2};
  scene.target_y = 0.5;
  const auto ws = sem_moving(cfg, scene);
  const auto obs = synthesize(cfg, scene, ws, 1, NoiseMode::disabled);
  ASSERT_EQ(obs.per_symbol.size(), 1000u);
  for (int l : {0, 377, 999}) {
    const Eigen::VectorXcd a = steering(cfg, scene, l);
    const std::complex<double> g = (a.transpose() * ws.symbols[l])(0);
    const Eigen::VectorXcd want = scene.reflection * g * a;
    EXPECT_LE((obs.per_symbol[l] - want).norm(), 1e-14 * want.norm());
  }
}

TEST(Synthesize, StackedIsConcatenation) {
  ArrayConfig cfg;
  cfg.n_symbols = 20;
  const Scene scene;
  const auto obs = synthesize(cfg, scene, iso_moving(cfg, scene, 2), 5);
  ASSERT_EQ(obs.stacked.size(), 20 * 16);
  for (int l = 0; l < 20; ++l) EXPECT_TRUE(obs.stacked.segment(16 * l, 16) == obs.per_symbol[l]);
  EXPECT_EQ(obs.seed, 5u);
}

TEST(Synthesize, Deterministic) {
  const ArrayConfig cfg;
  const Scene scene;
  const auto ws = sem_moving(cfg, scene);
  EXPECT_TRUE(synthesize(cfg, scene, ws, 42).stacked == synthesize(cfg, scene, ws, 42).stacked);
  EXPECT_FALSE(synthesize(cfg, scene, ws, 42).stacked == synthesize(cfg, scene, ws, 43).stacked);
}

TEST(Synthesize, NoiseStatistics) {
  ArrayConfig cfg;
  cfg.n_elements = 4;
  cfg.n_symbols = 10000;
  Scene scene;
  scene.reflection = 0.0;
  scene.noise_power = 3e-3;
  const auto obs = synthesize(cfg, scene, iso_moving(cfg, scene, 1), 9);
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(4, 4);
  double re2 = 0.0, im2 = 0.0;
  for (const auto& z : obs.per_symbol) {
    cov += z * z.adjoint();
    re2 += z.real().squaredNorm();
    im2 += z.imag().squaredNorm();
  }
  cov /= cfg.n_symbols;
  const Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(4, 4) * scene.noise_power;
  EXPECT_LE((cov - target).norm() / target.norm(), 0.05);
  const double k = 4.0 * cfg.n_symbols;
  EXPECT_NEAR(re2 / k, scene.noise_power / 2, 0.05 * scene.noise_power / 2);
  EXPECT_NEAR(im2 / k, scene.noise_power / 2, 0.05 * scene.noise_power / 2);
}

TEST(Synthesize, RejectsShapeMismatch) {
  ArrayConfig cfg;
  cfg.n_symbols = 4;
  const Scene scene;
  auto ws = sem_moving(cfg, scene);
  ws.symbols[2] = Eigen::VectorXcd::Zero(5);
  EXPECT_THROW(synthesize(cfg, scene, ws, 1), ContractError);
}

TEST(MeanVector, ZeroReflection) {
  const ArrayConfig cfg;
  Scene scene;
  scene.reflection = 0.0;
  EXPECT_EQ(mean_vector(cfg, scene, sem_moving(cfg, scene)).norm(), 0.0);
}

TEST(MeanVector, EqualsNoiselessSynthesis) {
  const ArrayConfig cfg;
  Scene scene;
  scene.target_y = -1.0;
  const auto ws = iso_moving(cfg, scene, 3);
  EXPECT_TRUE(mean_vector(cfg, scene, ws) == synthesize(cfg, scene, ws, 77, NoiseMode::disabled).stacked);
}

TEST(MeanVector, StaticTracks) {
  ArrayConfig cfg;
  cfg.n_symbols = 30;
  const Scene scene;
  const auto track = ArrayTrack::extended(cfg);
  const auto ws = sem_waveforms(track, scene);
  const Eigen::VectorXcd mu = mean_vector(track, scene, ws);
  ASSERT_EQ(mu.size(), 30 * 30);
  const auto a = extended_steering(cfg, scene).a;
  const std::complex<double> g = (a.transpose() * ws.symbols[0])(0);
  EXPECT_LE((mu.head(30) - g * a).norm(), 1e-14 * mu.head(30).norm());
}

TEST(MeanVector, SemSignalPower) {
  const ArrayConfig cfg;
  Scene scene;
  scene.reflection = {0.0, 2.0};
  const auto ws = sem_moving(cfg, scene);
  const auto obs = synthesize(cfg, scene, ws, 0, NoiseMode::disabled);
  for (int l : {0, 999}) {
    const double a2 = steering(cfg, scene, l).squaredNorm();
    const double want = std::norm(scene.reflection) * scene.tx_power * a2 * a2;
    EXPECT_LE(std::abs(obs.per_symbol[l].squaredNorm() - want), 1e-9 * want);
  }
}

TEST(ObservationFile, RoundTrip) {
  ObservationRecord rec;
  rec.cfg.n_symbols = 12;
  rec.cfg.n_elements = 3;
  rec.scene.target_y = 0.25;
  rec.scene.reflection = {0.1, 0.7};
  rec.architecture = Architecture::moving;
  rec.observation = synthesize(rec.cfg, rec.scene, sem_moving(rec.cfg, rec.scene), 1234);

  std::stringstream buf;
  write_observation(buf, rec);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 8), "NFMOBS01");
  EXPECT_EQ(bytes.size(), 8u + 4 + 8 + 8 + 80 + 4 + 12 * 3 * 16);

  const auto back = read_observation(buf);
  EXPECT_EQ(back.cfg.n_symbols, 12);
  EXPECT_EQ(back.cfg.n_elements, 3);
  EXPECT_EQ(back.scene.reflection, rec.scene.reflection);
  EXPECT_EQ(back.scene.target_y, 0.25);
  EXPECT_EQ(back.observation.seed, 1234u);
  EXPECT_TRUE(back.observation.stacked == rec.observation.stacked);
  ASSERT_EQ(back.observation.per_symbol.size(), 12u);
  EXPECT_TRUE(back.observation.per_symbol[11] == rec.observation.per_symbol[11]);
}

TEST(ObservationFile, RejectsBadInput) {
  std::stringstream junk("NOTANOBSxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx");
  EXPECT_THROW(read_observation(junk), ContractError);

  ObservationRecord rec;
  rec.cfg.n_symbols = 2;
  rec.observation = synthesize(rec.cfg, rec.scene, sem_moving(rec.cfg, rec.scene), 1);
  std::stringstream buf;
  write_observation(buf, rec);
  std::stringstream cut(buf.str().substr(0, buf.str().size() - 5));
  EXPECT_THROW(read_observation(cut), ContractError);
}
