#include "nfmove/crb.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>
#include <string>

#include "nfmove/channel.hpp"
#include "nfmove/errors.hpp"

namespace nfmove {

namespace {

using cd = std::complex<double>;

// Raw sums behind the moving-array FIM and G-terms:
//   T_pq = sum (dA_p s)^H (dA_q s),  C_p = sum (dA_p s)^H (A s),  E = sum |A s|^2
struct TraceSums {
  cd t_xx, t_xy, t_yy;
  cd c_x, c_y;
  double e = 0.0;
};

void check_waveforms(const ArrayTrack& track, const WaveformSet& ws) {
  if (ws.n_symbols() != track.n_symbols())
    throw ContractError("waveform has " + std::to_string(ws.n_symbols()) + " symbols, track has " +
                        std::to_string(track.n_symbols()));
  for (const auto& s : ws.symbols)
    if (s.size() != track.n_elements())
      throw ContractError("waveform dimension does not match the number of elements");
}

TraceSums waveform_sums(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws) {
  scene.validate();
  check_waveforms(track, ws);

  TraceSums sums;
  SteeringBundle bundle;
  for (int l = 0; l < track.n_symbols(); ++l) {
    if (l == 0 || !track.is_static()) bundle = steering_bundle(track, scene, l);
    const Eigen::VectorXcd& s = ws.symbols[l];
    const cd g = bundle.a.transpose() * s;
    const cd gx = bundle.da_dx.transpose() * s;
    const cd gy = bundle.da_dy.transpose() * s;
    const Eigen::VectorXcd as = bundle.a * g;
    const Eigen::VectorXcd dxs = bundle.da_dx * g + bundle.a * gx;
    const Eigen::VectorXcd dys = bundle.da_dy * g + bundle.a * gy;
    sums.t_xx += dxs.squaredNorm();
    sums.t_yy += dys.squaredNorm();
    sums.t_xy += dxs.dot(dys);
    sums.c_x += dxs.dot(as);
    sums.c_y += dys.dot(as);
    sums.e += as.squaredNorm();
  }
  return sums;
}

// Below this fraction of the un-reduced term, a Schur complement is at the
// rounding level of its own subtraction and carries no information.
constexpr double kDegenerateFraction = 1e-13;

GTerms gterms_from_sums(const TraceSums& s) {
  if (!(s.e > 0.0)) throw DegenerateGeometryError("no signal energy reaches the target");
  GTerms g;
  g.g_xx = (s.t_xx - s.c_x * std::conj(s.c_x) / s.e).real();
  g.g_yy = (s.t_yy - s.c_y * std::conj(s.c_y) / s.e).real();
  g.g_xy = s.t_xy - s.c_x * std::conj(s.c_y) / s.e;
  if (g.g_xx <= kDegenerateFraction * s.t_xx.real()) g.g_xx = 0.0;
  if (g.g_yy <= kDegenerateFraction * s.t_yy.real()) g.g_yy = 0.0;
  const double prod = g.g_xx * g.g_yy;
  g.alpha = prod > 0.0 ? g.g_xy.real() * g.g_xy.real() / prod : std::numeric_limits<double>::quiet_NaN();
  return g;
}

// Static covariance G-terms without the T - |C|^2/E subtraction. Split
// da_p = mu_p a + e_p with e_p orthogonal to a; the part of dA_p along A drops
// out and, with <x, y> = x^H R^* y,
//   G_pq = (e_p^H e_q) <a, a> + |a|^2 (<e_p, e_q> - <e_p, a> <a, e_q> / <a, a>).
// For R = c I the bracket is c e_p^H e_q, for R = v v^H it vanishes.
GTerms covariance_gterms(const SteeringBundle& b, const CovarianceSpec& R) {
  const double na = b.a.squaredNorm();
  const auto form = [&](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
    return std::conj(cd(x.transpose() * R.apply(y.conjugate())));
  };
  const double raa = form(b.a, b.a).real();
  if (!(na > 0.0) || !(raa > 0.0)) throw DegenerateGeometryError("no signal energy reaches the target");
  const Eigen::VectorXcd e_x = b.da_dx - (b.a.dot(b.da_dx) / na) * b.a;
  const Eigen::VectorXcd e_y = b.da_dy - (b.a.dot(b.da_dy) / na) * b.a;
  const cd rxa = form(e_x, b.a);
  const cd rya = form(e_y, b.a);
  const auto g = [&](const Eigen::VectorXcd& ep, const Eigen::VectorXcd& eq, cd rpa, cd rqa) {
    return ep.dot(eq) * raa + na * (form(ep, eq) - rpa * std::conj(rqa) / raa);
  };
  GTerms out;
  out.g_xx = g(e_x, e_x, rxa, rxa).real();
  out.g_yy = g(e_y, e_y, rya, rya).real();
  out.g_xy = g(e_x, e_y, rxa, rya);
  // rounding floor of the projection itself
  constexpr double kFloor = 64.0 * std::numeric_limits<double>::epsilon();
  if (!(out.g_xx > 0.0) || e_x.norm() <= kFloor * b.da_dx.norm()) out.g_xx = 0.0;
  if (!(out.g_yy > 0.0) || e_y.norm() <= kFloor * b.da_dy.norm()) out.g_yy = 0.0;
  const double prod = out.g_xx * out.g_yy;
  out.alpha = prod > 0.0 ? out.g_xy.real() * out.g_xy.real() / prod : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double bound_from_gterms(const GTerms& g, const Scene& scene, double symbols) {
  const double det = g.g_xx * g.g_yy - g.g_xy.real() * g.g_xy.real();
  if (!(g.g_xx > 0.0) || !(g.g_yy > 0.0) || !(det > 0.0))
    throw DegenerateGeometryError("position block of the Fisher information is singular");
  const double b2 = std::norm(scene.reflection);
  if (!(b2 > 0.0)) throw DegenerateGeometryError("zero reflection coefficient");
  return scene.noise_power / (2.0 * b2 * symbols) * (g.g_xx + g.g_yy) / det;
}

Eigen::Matrix4d equilibrated(const Eigen::Matrix4d& F, Eigen::Vector4d& scale) {
  for (int i = 0; i < 4; ++i) {
    if (!(F(i, i) > 0.0)) throw SingularFimError("non-positive FIM diagonal", std::numeric_limits<double>::infinity());
    scale[i] = 1.0 / std::sqrt(F(i, i));
  }
  return scale.asDiagonal() * F * scale.asDiagonal();
}

}  // namespace

double CrbReport::rmse_lower_bound() const { return std::sqrt(crb_position); }

Fim fim(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws) {
  const TraceSums s = waveform_sums(track, scene, ws);
  const double inv_noise = 1.0 / scene.noise_power;
  const cd b = scene.reflection;
  const double b2 = std::norm(b);
  const cd f_xx = b2 * inv_noise * s.t_xx;
  const cd f_yy = b2 * inv_noise * s.t_yy;
  const cd f_xy = b2 * inv_noise * s.t_xy;
  const cd f_xb = std::conj(b) * inv_noise * s.c_x;
  const cd f_yb = std::conj(b) * inv_noise * s.c_y;
  const double f_bb = inv_noise * s.e;

  Fim F;
  F.matrix << f_xx.real(), f_xy.real(), f_xb.real(), -f_xb.imag(),
              f_xy.real(), f_yy.real(), f_yb.real(), -f_yb.imag(),
              f_xb.real(), f_yb.real(), f_bb, 0.0,
              -f_xb.imag(), -f_yb.imag(), 0.0, f_bb;
  F.matrix *= 2.0;
  return F;
}

Fim fim_moving(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws) {
  return fim(ArrayTrack::moving(cfg), scene, ws);
}

double fim_condition(const Fim& F) {
  Eigen::Vector4d scale;
  const Eigen::Matrix4d M = equilibrated(F.matrix, scale);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(M, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double crb_from_fim(const Fim& F) {
  const double cond = fim_condition(F);
  if (!(cond <= kFimConditionLimit))
    throw SingularFimError("FIM condition number " + std::to_string(cond) + " exceeds limit", cond);
  const Eigen::Matrix4d& m = F.matrix;
  const Eigen::Matrix2d schur =
      m.topLeftCorner<2, 2>() - m.topRightCorner<2, 2>() * m.bottomRightCorner<2, 2>().inverse() *
                                    m.topRightCorner<2, 2>().transpose();
  const double det = schur(0, 0) * schur(1, 1) - schur(0, 1) * schur(1, 0);
  return (schur(0, 0) + schur(1, 1)) / det;
}

double crb_from_fim_full_inverse(const Fim& F) {
  const double cond = fim_condition(F);
  if (!(cond <= kFimConditionLimit))
    throw SingularFimError("FIM condition number " + std::to_string(cond) + " exceeds limit", cond);
  Eigen::Vector4d scale;
  const Eigen::Matrix4d M = equilibrated(F.matrix, scale);
  const Eigen::Matrix4d inv = M.fullPivLu().inverse();
  return inv(0, 0) * scale[0] * scale[0] + inv(1, 1) * scale[1] * scale[1];
}

namespace {

// G-terms as Gram entries of explicit residuals. Stacking over symbols,
//   u_a = [a_l g_l],  u_p = [da_p,l g_l + a_l g_p,l],  g_l = a_l^T s_l,  g_p,l = da_p,l^T s_l,
//   r_p = u_p - (u_a^H u_p / |u_a|^2) u_a,  G_pq = r_p^H r_q,
// and the position determinant G_xx |r_y - (Re G_xy / G_xx) r_x|^2. Forming the
// residuals first keeps the cancellation at the vector level.
struct Projected {
  GTerms g;
  double det = 0.0;
};

Projected projected_gterms(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws) {
  scene.validate();
  check_waveforms(track, ws);

  const int L = track.n_symbols();
  const int N = track.n_elements();
  std::vector<SteeringBundle> bundles(track.is_static() ? 1 : L);
  for (std::size_t i = 0; i < bundles.size(); ++i) bundles[i] = steering_bundle(track, scene, static_cast<int>(i));
  const auto bundle = [&](int l) -> const SteeringBundle& { return bundles[track.is_static() ? 0 : l]; };

  // The algebra below runs in long double: for far targets the residuals are
  // many orders smaller than the vectors they come from.
  using cl = std::complex<long double>;
  const auto up = [](cd z) { return cl(z.real(), z.imag()); };
  std::vector<cl> g(L), gx(L), gy(L);
  long double energy = 0.0L;
  cl cx, cy;  // u_a^H u_p
  long double norm_ux = 0.0L, norm_uy = 0.0L;
  for (int l = 0; l < L; ++l) {
    const SteeringBundle& b = bundle(l);
    const Eigen::VectorXcd& s = ws.symbols[l];
    long double na = 0.0L;
    cl ax, ay;  // a^H da_p
    for (int n = 0; n < N; ++n) {
      const cl a = up(b.a[n]), dx = up(b.da_dx[n]), dy = up(b.da_dy[n]), sn = up(s[n]);
      g[l] += a * sn;
      gx[l] += dx * sn;
      gy[l] += dy * sn;
      na += std::norm(a);
      ax += std::conj(a) * dx;
      ay += std::conj(a) * dy;
    }
    energy += std::norm(g[l]) * na;
    cx += std::conj(g[l]) * (g[l] * ax + na * gx[l]);
    cy += std::conj(g[l]) * (g[l] * ay + na * gy[l]);
    for (int n = 0; n < N; ++n) {
      const cl a = up(b.a[n]);
      norm_ux += std::norm(up(b.da_dx[n]) * g[l] + a * gx[l]);
      norm_uy += std::norm(up(b.da_dy[n]) * g[l] + a * gy[l]);
    }
  }
  if (!(energy > 0.0L)) throw DegenerateGeometryError("no signal energy reaches the target");
  const cl mu_x = cx / energy;
  const cl mu_y = cy / energy;

  std::vector<cl> rx(static_cast<std::size_t>(L) * N), ry(rx.size());
  long double gxx = 0.0L, gyy = 0.0L;
  cl gxy;
  for (int l = 0; l < L; ++l) {
    const SteeringBundle& b = bundle(l);
    const cl kx = gx[l] - mu_x * g[l];
    const cl ky = gy[l] - mu_y * g[l];
    for (int n = 0; n < N; ++n) {
      const std::size_t i = static_cast<std::size_t>(l) * N + n;
      const cl a = up(b.a[n]);
      rx[i] = up(b.da_dx[n]) * g[l] + a * kx;
      ry[i] = up(b.da_dy[n]) * g[l] + a * ky;
      gxx += std::norm(rx[i]);
      gyy += std::norm(ry[i]);
      gxy += std::conj(rx[i]) * ry[i];
    }
  }

  // rounding floor of the projections themselves
  constexpr long double kFloor = 64.0L * std::numeric_limits<long double>::epsilon();
  if (std::sqrt(gxx) <= kFloor * std::sqrt(norm_ux)) gxx = 0.0L;
  if (std::sqrt(gyy) <= kFloor * std::sqrt(norm_uy)) gyy = 0.0L;
  long double det = 0.0L;
  if (gxx > 0.0L && gyy > 0.0L) {
    const long double t = gxy.real() / gxx;
    long double w2 = 0.0L;
    for (std::size_t i = 0; i < rx.size(); ++i) w2 += std::norm(ry[i] - t * rx[i]);
    det = std::sqrt(w2) <= kFloor * std::sqrt(gyy) ? 0.0L : gxx * w2;
  }
  Projected out;
  out.g.g_xx = static_cast<double>(gxx);
  out.g.g_yy = static_cast<double>(gyy);
  out.g.g_xy = {static_cast<double>(gxy.real()), static_cast<double>(gxy.imag())};
  const long double prod = gxx * gyy;
  out.g.alpha = prod > 0.0L ? static_cast<double>(gxy.real() * gxy.real() / prod)
                            : std::numeric_limits<double>::quiet_NaN();
  out.det = static_cast<double>(det);
  return out;
}

double bound_from_det(const GTerms& g, double det, const Scene& scene) {
  if (!(g.g_xx > 0.0) || !(g.g_yy > 0.0) || !(det > 0.0))
    throw DegenerateGeometryError("position block of the Fisher information is singular");
  const double b2 = std::norm(scene.reflection);
  if (!(b2 > 0.0)) throw DegenerateGeometryError("zero reflection coefficient");
  return scene.noise_power / (2.0 * b2) * (g.g_xx + g.g_yy) / det;
}

}  // namespace

GTerms gterms(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws) {
  return projected_gterms(track, scene, ws).g;
}

CrbReport crb_closed(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws) {
  const Projected p = projected_gterms(track, scene, ws);
  CrbReport report;
  report.gterms = p.g;
  report.crb_position = bound_from_det(p.g, p.det, scene);
  report.architecture = track.architecture();
  report.scheme = ws.scheme;
  return report;
}

CrbReport crb_moving_closed(const ArrayConfig& cfg, const Scene& scene, const WaveformSet& ws) {
  return crb_closed(ArrayTrack::moving(cfg), scene, ws);
}

GTerms gterms_static(const ArrayTrack& track, const Scene& scene, const CovarianceSpec& R) {
  if (!track.is_static()) throw ContractError("covariance-only bound needs a static array");
  if (R.dim() != track.n_elements())
    throw ContractError("covariance is " + std::to_string(R.dim()) + "-dimensional, array has " +
                        std::to_string(track.n_elements()) + " elements");
  return covariance_gterms(steering_bundle(track, scene, 0), R);
}

CrbReport crb_static(const ArrayTrack& track, const Scene& scene, const CovarianceSpec& R) {
  CrbReport report;
  report.gterms = gterms_static(track, scene, R);
  report.crb_position = bound_from_gterms(report.gterms, scene, track.n_symbols());
  report.architecture = track.architecture();
  report.scheme = R.scheme();
  return report;
}

CrbReport crb_fixed(const ArrayConfig& cfg, const Scene& scene, const CovarianceSpec& R) {
  return crb_static(ArrayTrack::fixed(cfg), scene, R);
}

CrbReport crb_extended(const ArrayConfig& cfg, const Scene& scene, const CovarianceSpec& R_hat) {
  return crb_static(ArrayTrack::extended(cfg), scene, R_hat);
}

GTerms gterms_moving_sem_vector_form(const ArrayConfig& cfg, const Scene& scene) {
  const ArrayTrack track = ArrayTrack::moving(cfg);
  scene.validate();
  const double p0 = scene.tx_power;
  cd first_xx, first_yy, first_xy;
  cd cross_x, cross_y;  // sum |a|^2 (a^H da_p)
  double norm4 = 0.0;
  for (int l = 0; l < track.n_symbols(); ++l) {
    const SteeringBundle b = steering_bundle(track, scene, l);
    const double na = b.a.squaredNorm();
    const cd beta_x = b.a.dot(b.da_dx);
    const cd beta_y = b.a.dot(b.da_dy);
    first_xx += na * b.da_dx.squaredNorm() + 3.0 * std::norm(beta_x);
    first_yy += na * b.da_dy.squaredNorm() + 3.0 * std::norm(beta_y);
    first_xy += na * b.da_dx.dot(b.da_dy) + 3.0 * std::conj(beta_x) * beta_y;
    cross_x += na * beta_x;
    cross_y += na * beta_y;
    norm4 += na * na;
  }
  TraceSums s;
  // Rewritten in TraceSums form so the degeneracy rules match the other paths:
  // C_p = 2 P0 sum |a|^2 conj(beta_p), E = P0 sum |a|^4.
  s.t_xx = p0 * first_xx;
  s.t_yy = p0 * first_yy;
  s.t_xy = p0 * first_xy;
  s.c_x = 2.0 * p0 * std::conj(cross_x);
  s.c_y = 2.0 * p0 * std::conj(cross_y);
  s.e = p0 * norm4;
  return gterms_from_sums(s);
}

namespace {

struct PairSums {
  double xx = 0.0, yy = 0.0, xy = 0.0;
};

// sum_{i<j} w_ij (1/(d_i^2 d_j) - 1/(d_j^2 d_i)) (y_i/(d_i^2 d_j) - y_j/(d_j^2 d_i)) and the
// two squared forms; w_ij = 1 or 1/(d_i^2 d_j^2).
PairSums pair_sums(const Eigen::VectorXd& d, const Eigen::VectorXd& y, bool weighted) {
  PairSums out;
  const Eigen::Index n = d.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double di2 = d[i] * d[i];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dj2 = d[j] * d[j];
      const double u = 1.0 / (di2 * d[j]) - 1.0 / (dj2 * d[i]);
      const double v = y[i] / (di2 * d[j]) - y[j] / (dj2 * d[i]);
      const double w = weighted ? 1.0 / (di2 * dj2) : 1.0;
      out.xx += w * u * u;
      out.yy += w * v * v;
      out.xy += w * u * v;
    }
  }
  return out;
}

GTerms finish_approx(double g_xx, double g_yy, double g_xy) {
  GTerms g;
  g.g_xx = g_xx;
  g.g_yy = g_yy;
  g.g_xy = g_xy;
  const double prod = g_xx * g_yy;
  g.alpha = prod > 0.0 ? g_xy * g_xy / prod : std::numeric_limits<double>::quiet_NaN();
  return g;
}

}  // namespace

GTerms gterms_sem_approx(const ArrayConfig& cfg, const Scene& scene, Architecture arch) {
  cfg.validate();
  scene.validate();
  const double x = scene.target_x;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double lam2 = scene.wavelength * scene.wavelength;
  const double p0 = scene.tx_power;

  // Distances from the target to element 0 over symbols, or to every element
  // at symbol 0 for the conventional array.
  const int count = arch == Architecture::fixed ? cfg.n_elements : cfg.n_symbols;
  Eigen::VectorXd d(count), y(count);
  for (int i = 0; i < count; ++i) {
    const double pos = arch == Architecture::fixed ? antenna_position(cfg, 0, i) : antenna_position(cfg, i, 0);
    y[i] = scene.target_y - pos;
    d[i] = std::hypot(x, y[i]);
  }

  if (arch != Architecture::moving) {
    const PairSums s = pair_sums(d, y, false);
    const double k = p0 * lam2 / (64.0 * pi2);
    return finish_approx(k * x * x * s.xx, k * s.yy, k * x * s.xy);
  }
  const PairSums s = pair_sums(d, y, true);
  double inv_d4 = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) inv_d4 += 1.0 / std::pow(d[i], 4);
  const double n2 = static_cast<double>(cfg.n_elements) * cfg.n_elements;
  const double k = n2 * p0 * lam2 / (16.0 * pi2) / inv_d4;
  return finish_approx(k * x * x * s.xx, k * s.yy, k * x * s.xy);
}

CrbReport crb_sem_approx(const ArrayConfig& cfg, const Scene& scene, Architecture arch) {
  CrbReport report;
  report.gterms = gterms_sem_approx(cfg, scene, arch);
  report.architecture = arch;
  report.scheme = Scheme::sem;
  const GTerms& g = report.gterms;
  if (!(g.g_xx > 0.0) || !(g.g_yy > 0.0))
    throw DegenerateGeometryError("closed-form G-terms vanish; target is unresolvable");
  const double symbols = arch == Architecture::moving ? 1.0 : cfg.n_symbols;
  const double b2 = std::norm(scene.reflection);
  report.crb_position =
      scene.noise_power / (2.0 * b2 * symbols * (1.0 - g.alpha)) * (1.0 / g.g_xx + 1.0 / g.g_yy);
  return report;
}

double asymptotic_ratio(const ArrayConfig& cfg) {
  cfg.validate();
  const double l = cfg.n_symbols;
  const double n = cfg.n_elements;
  return l * l / (4.0 * n * n);
}

CrbReport crb_for(const ArrayConfig& cfg, const Scene& scene, Architecture arch, Scheme scheme,
                  std::uint64_t seed) {
  switch (arch) {
    case Architecture::moving: {
      const ArrayTrack track = ArrayTrack::moving(cfg);
      const WaveformSet ws = scheme == Scheme::sem ? sem_waveforms(track, scene) : iso_waveforms(track, scene, seed);
      return crb_closed(track, scene, ws);
    }
    case Architecture::fixed:
      return crb_fixed(cfg, scene, scheme == Scheme::sem ? sem_fixed(cfg, scene) : iso_fixed(cfg, scene));
    case Architecture::extended:
      return crb_extended(cfg, scene, scheme == Scheme::sem ? sem_extended(cfg, scene) : iso_extended(cfg, scene));
  }
  throw DomainError("unknown architecture");
}

}  // namespace nfmove
