#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nfmove/channel.hpp"

namespace oracle {

cld steering_entry(long double position, long double x, long double y, long double wavelength) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double dy = y - position;
  const long double d = std::sqrt(x * x + dy * dy);
  const long double phase = -2.0L * pi * d / wavelength;
  return wavelength / (4.0L * pi * d) * cld(std::cos(phase), std::sin(phase));
}

Eigen::VectorXcd steering_fd(const Eigen::VectorXd& positions, double x, double y, double wavelength,
                             nfmove::Axis axis, double step) {
  Eigen::VectorXcd out(positions.size());
  for (Eigen::Index n = 0; n < positions.size(); ++n) {
    cld plus, minus;
    if (axis == nfmove::Axis::x) {
      plus = steering_entry(positions[n], x + step, y, wavelength);
      minus = steering_entry(positions[n], x - step, y, wavelength);
    } else {
      plus = steering_entry(positions[n], x, y + step, wavelength);
      minus = steering_entry(positions[n], x, y - step, wavelength);
    }
    const cld d = (plus - minus) / (2.0L * step);
    out[n] = {static_cast<double>(d.real()), static_cast<double>(d.imag())};
  }
  return out;
}

Eigen::MatrixXcd mean_jacobian_fd(const nfmove::ArrayTrack& track, const nfmove::Scene& scene,
                                  const nfmove::WaveformSet& ws, double step) {
  auto shifted = [&](double dx, double dy) {
    nfmove::Scene s = scene;
    s.target_x += dx;
    s.target_y += dy;
    return nfmove::mean_vector(track, s, ws);
  };
  const Eigen::VectorXcd mu = nfmove::mean_vector(track, scene, ws);
  Eigen::MatrixXcd J(mu.size(), 4);
  J.col(0) = (shifted(step, 0.0) - shifted(-step, 0.0)) / (2.0 * step);
  J.col(1) = (shifted(0.0, step) - shifted(0.0, -step)) / (2.0 * step);
  J.col(2) = mu / scene.reflection;
  J.col(3) = std::complex<double>(0.0, 1.0) * mu / scene.reflection;
  return J;
}

Eigen::Matrix4d slepian_bangs(const Eigen::MatrixXcd& jacobian, double noise_power) {
  return 2.0 / noise_power * (jacobian.adjoint() * jacobian).real();
}

long double crb_by_inverse(const Eigen::Matrix4d& F) {
  const Matrix4ld inv = F.cast<long double>().fullPivLu().inverse();
  return inv(0, 0) + inv(1, 1);
}

namespace {

VectorXcld promote(const Eigen::VectorXcd& v) {
  VectorXcld out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = cld(v[i].real(), v[i].imag());
  return out;
}

}  // namespace

double crb_fim_50_digits(const nfmove::ArrayTrack& track, const nfmove::Scene& scene,
                         const nfmove::WaveformSet& ws) {
  using F = boost::multiprecision::cpp_bin_float_50;
  struct C {
    F re, im;
    C operator+(const C& o) const { return {re + o.re, im + o.im}; }
    C operator*(const C& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    C conj() const { return {re, -im}; }
    F norm() const { return re * re + im * im; }
  };
  const auto up = [](std::complex<double> z) { return C{F(z.real()), F(z.imag())}; };

  C txx{0, 0}, tyy{0, 0}, txy{0, 0}, cx{0, 0}, cy{0, 0};
  F e = 0;
  const int N = track.n_elements();
  for (int l = 0; l < track.n_symbols(); ++l) {
    const auto b = nfmove::steering_bundle(track, scene, l);
    std::vector<C> a(N), ax(N), ay(N), s(N);
    for (int n = 0; n < N; ++n) {
      a[n] = up(b.a[n]);
      ax[n] = up(b.da_dx[n]);
      ay[n] = up(b.da_dy[n]);
      s[n] = up(ws.symbols[l][n]);
    }
    // A s = a (a^T s),  dA_p s = da_p (a^T s) + a (da_p^T s)
    C g{0, 0}, gx{0, 0}, gy{0, 0};
    for (int n = 0; n < N; ++n) {
      g = g + a[n] * s[n];
      gx = gx + ax[n] * s[n];
      gy = gy + ay[n] * s[n];
    }
    for (int n = 0; n < N; ++n) {
      const C as = a[n] * g;
      const C xs = ax[n] * g + a[n] * gx;
      const C ys = ay[n] * g + a[n] * gy;
      txx = txx + xs.conj() * xs;
      tyy = tyy + ys.conj() * ys;
      txy = txy + xs.conj() * ys;
      cx = cx + xs.conj() * as;
      cy = cy + ys.conj() * as;
      e += as.norm();
    }
  }
  const F inv_noise = F(1) / F(scene.noise_power);
  const C b = up(scene.reflection);
  const F b2 = b.norm();
  const C fxb = b.conj() * cx, fyb = b.conj() * cy;
  F m[4][8];
  const F entries[4][4] = {
      {b2 * txx.re, b2 * txy.re, fxb.re, -fxb.im},
      {b2 * txy.re, b2 * tyy.re, fyb.re, -fyb.im},
      {fxb.re, fyb.re, e, F(0)},
      {-fxb.im, -fyb.im, F(0), e},
  };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j) m[i][j] = j < 4 ? F(2) * inv_noise * entries[i][j] : F(j - 4 == i ? 1 : 0);
  for (int c = 0; c < 4; ++c) {
    int pivot = c;
    for (int r = c + 1; r < 4; ++r)
      if (abs(m[r][c]) > abs(m[pivot][c])) pivot = r;
    for (int j = 0; j < 8; ++j) std::swap(m[c][j], m[pivot][j]);
    const F d = m[c][c];
    for (int j = 0; j < 8; ++j) m[c][j] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const F f = m[r][c];
      for (int j = 0; j < 8; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return static_cast<double>(m[0][4] + m[1][5]);
}

nfmove::GTerms static_gterms_explicit(const nfmove::ArrayTrack& track, const nfmove::Scene& scene,
                                      const Eigen::MatrixXcd& R) {
  const auto bundle = nfmove::steering_bundle(track, scene, 0);
  const VectorXcld a = promote(bundle.a), ax = promote(bundle.da_dx), ay = promote(bundle.da_dy);
  MatrixXcld Rl(R.rows(), R.cols());
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.cols(); ++j) Rl(i, j) = cld(R(i, j).real(), R(i, j).imag());
  const MatrixXcld A = a * a.transpose();
  const MatrixXcld Ax = ax * a.transpose() + a * ax.transpose();
  const MatrixXcld Ay = ay * a.transpose() + a * ay.transpose();
  auto tr = [&](const MatrixXcld& P, const MatrixXcld& Q) { return (P.adjoint() * Q * Rl).trace(); };
  const cld txx = tr(Ax, Ax), tyy = tr(Ay, Ay), txy = tr(Ax, Ay);
  const cld cx = tr(Ax, A), cy = tr(Ay, A);
  const long double e = tr(A, A).real();
  nfmove::GTerms g;
  g.g_xx = static_cast<double>((txx - cx * std::conj(cx) / e).real());
  g.g_yy = static_cast<double>((tyy - cy * std::conj(cy) / e).real());
  const cld gxy = txy - cx * std::conj(cy) / e;
  g.g_xy = {static_cast<double>(gxy.real()), static_cast<double>(gxy.imag())};
  g.alpha = g.g_xy.real() * g.g_xy.real() / (g.g_xx * g.g_yy);
  return g;
}

Profiled profile_explicit(const nfmove::ArrayTrack& track, double wavelength, double x, double y,
                          const nfmove::WaveformSet& ws, const nfmove::Observation& obs) {
  cld num = 0.0L;
  long double den = 0.0L;
  long double energy = 0.0L;
  const int L = track.n_symbols(), N = track.n_elements();
  std::vector<VectorXcld> responses(L);
  for (int l = 0; l < L; ++l) {
    VectorXcld a(N);
    for (int n = 0; n < N; ++n) a[n] = steering_entry(track.position(l, n), x, y, wavelength);
    cld g = 0.0L;
    for (int n = 0; n < N; ++n) g += a[n] * cld(ws.symbols[l][n].real(), ws.symbols[l][n].imag());
    responses[l] = a * g;
    for (int n = 0; n < N; ++n) {
      const cld r(obs.per_symbol[l][n].real(), obs.per_symbol[l][n].imag());
      num += std::conj(responses[l][n]) * r;
      den += std::norm(responses[l][n]);
      energy += std::norm(r);
    }
  }
  const cld b = num / den;
  long double residual = 0.0L;
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < N; ++n) {
      const cld r(obs.per_symbol[l][n].real(), obs.per_symbol[l][n].imag());
      residual += std::norm(r - b * responses[l][n]);
    }
  (void)energy;
  const long double samples = static_cast<long double>(L) * N;
  Profiled p;
  p.reflection = {static_cast<double>(b.real()), static_cast<double>(b.imag())};
  p.residual = static_cast<double>(residual);
  p.loglik = static_cast<double>(-samples * (std::log(std::numbers::pi_v<long double> / samples) + 1.0L +
                                             std::log(std::max(residual, 1e-30L))));
  return p;
}

RandomScene random_scene(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(2.0, 100.0), uy(-10.0, 10.0), ustep(0.05, 0.5);
  std::uniform_int_distribution<int> un(1, 8), ul(2, 64);
  RandomScene s;
  s.scene.target_x = ux(rng);
  s.scene.target_y = uy(rng);
  s.cfg.n_elements = un(rng);
  s.cfg.n_symbols = ul(rng);
  s.cfg.spacing = s.scene.wavelength / 2.0;
  s.cfg.symbol_duration = 1e-3;
  s.cfg.speed = ustep(rng) / s.cfg.symbol_duration;
  return s;
}

}  // namespace oracle
