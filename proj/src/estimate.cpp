#include "nfmove/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "nfmove/channel.hpp"
#include "nfmove/crb.hpp"
#include "nfmove/errors.hpp"
#include "nfmove/rng.hpp"

namespace nfmove {

ConcentratedLikelihood::ConcentratedLikelihood(const ArrayTrack& track, double wavelength, const WaveformSet& ws,
                                               const Observation& obs)
    : track_(track), wavelength_(wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be > 0");
  const int L = track.n_symbols();
  const int N = track.n_elements();
  if (ws.n_symbols() != L || ws.n_elements() != N) throw ContractError("waveform shape does not match the track");
  if (static_cast<int>(obs.per_symbol.size()) != L) throw ContractError("observation symbol count mismatch");
  for (const auto& r : obs.per_symbol)
    if (r.size() != N) throw ContractError("observation dimension mismatch");
  for (const auto& s : ws.symbols)
    if (s.size() != N) throw ContractError("waveform shape does not match the track");

  samples_ = L * N;
  for (const auto& r : obs.per_symbol) energy_ += r.squaredNorm();

  if (track.is_static()) {
    rank_one_ = std::all_of(ws.symbols.begin(), ws.symbols.end(),
                            [&](const Eigen::VectorXcd& s) { return s == ws.symbols.front(); });
    r_sum_ = Eigen::VectorXcd::Zero(N);
    for (const auto& r : obs.per_symbol) r_sum_ += r;
    if (rank_one_) {
      waveform_ = ws.symbols.front();
    } else {
      Eigen::MatrixXcd S(N, L), Rm(N, L);
      for (int l = 0; l < L; ++l) {
        S.col(l) = ws.symbols[l];
        Rm.col(l) = obs.per_symbol[l];
      }
      cross_ = Rm * S.adjoint();
      gram_ = S * S.adjoint();
    }
    return;
  }

  // Collapse positions visited by several (symbol, element) pairs.
  std::vector<std::pair<double, int>> all;
  all.reserve(samples_);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < N; ++n) all.emplace_back(track.position(l, n), l * N + n);
  std::sort(all.begin(), all.end());
  std::vector<double> unique;
  position_index_.assign(samples_, 0);
  for (const auto& [pos, flat] : all) {
    if (unique.empty() || pos - unique.back() > 1e-12 * std::max(1.0, std::abs(pos))) unique.push_back(pos);
    position_index_[flat] = static_cast<int>(unique.size()) - 1;
  }
  unique_positions_ = Eigen::Map<const Eigen::VectorXd>(unique.data(), static_cast<Eigen::Index>(unique.size()));

  symbols_re_.resize(samples_);
  symbols_im_.resize(samples_);
  received_re_.resize(samples_);
  received_im_.resize(samples_);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < N; ++n) {
      symbols_re_[l * N + n] = ws.symbols[l][n].real();
      symbols_im_[l * N + n] = ws.symbols[l][n].imag();
      received_re_[l * N + n] = obs.per_symbol[l][n].real();
      received_im_[l * N + n] = obs.per_symbol[l][n].imag();
    }
}

ConcentratedLikelihood::Projection ConcentratedLikelihood::project_static(const Eigen::VectorXcd& a) const {
  Projection p;
  const double na = a.squaredNorm();
  if (rank_one_) {
    const std::complex<double> g = a.transpose() * waveform_;
    p.numerator = std::conj(g) * a.dot(r_sum_);
    p.denominator = track_.n_symbols() * std::norm(g) * na;
  } else {
    const Eigen::VectorXcd ac = a.conjugate();
    p.numerator = a.dot(cross_ * ac);
    p.denominator = na * (a.transpose() * gram_ * ac)(0, 0).real();
  }
  return p;
}

ConcentratedLikelihood::Projection ConcentratedLikelihood::project_moving(Point h) const {
  const double inv_lambda = 1.0 / wavelength_;
  const double amp = wavelength_ / (4.0 * std::numbers::pi);
  const double x2 = h.x * h.x;
  const auto n_unique = unique_positions_.size();
  std::vector<double> a_re(n_unique), a_im(n_unique), mag2(n_unique);
  for (Eigen::Index u = 0; u < n_unique; ++u) {
    const double dy = h.y - unique_positions_[u];
    const double d = std::sqrt(x2 + dy * dy);
    const double m = amp / d;
    // Reduce the phase to one cycle before the trig calls.
    double cycles = d * inv_lambda;
    cycles -= std::floor(cycles);
    const double phase = 2.0 * std::numbers::pi * cycles;
    a_re[u] = m * std::cos(phase);
    a_im[u] = -m * std::sin(phase);
    mag2[u] = m * m;
  }
  const int L = track_.n_symbols();
  const int N = track_.n_elements();
  double num_re = 0.0, num_im = 0.0, den = 0.0;
  for (int l = 0; l < L; ++l) {
    double g_re = 0.0, g_im = 0.0, p_re = 0.0, p_im = 0.0, na = 0.0;
    const int base = l * N;
    for (int n = 0; n < N; ++n) {
      const int u = position_index_[base + n];
      const double ar = a_re[u], ai = a_im[u];
      const double sr = symbols_re_[base + n], si = symbols_im_[base + n];
      const double rr = received_re_[base + n], ri = received_im_[base + n];
      g_re += ar * sr - ai * si;
      g_im += ar * si + ai * sr;
      p_re += ar * rr + ai * ri;
      p_im += ar * ri - ai * rr;
      na += mag2[u];
    }
    // conj(g) * proj
    num_re += g_re * p_re + g_im * p_im;
    num_im += g_re * p_im - g_im * p_re;
    den += (g_re * g_re + g_im * g_im) * na;
  }
  return {{num_re, num_im}, den};
}

ConcentratedLikelihood::Value ConcentratedLikelihood::evaluate(Point h) const {
  if (!(h.x > 0.0)) throw DomainError("hypothesis x must be > 0");
  const Projection p = track_.is_static()
                           ? project_static(steering_vector_at(track_.row(0), h.x, h.y, wavelength_))
                           : project_moving(h);
  if (!(p.denominator > 0.0)) throw DegenerateHypothesisError("no signal projects onto the hypothesis");
  Value v;
  v.reflection = p.numerator / p.denominator;
  v.residual = std::max(energy_ - std::norm(p.numerator) / p.denominator, 0.0);
  const double ln_samples = static_cast<double>(samples_);
  v.loglik = -ln_samples * (std::log(std::numbers::pi / ln_samples) + 1.0 + std::log(std::max(v.residual, kResidualFloor)));
  return v;
}

std::complex<double> b_tilde(const ArrayTrack& track, double wavelength, Point h, const WaveformSet& ws,
                             const Observation& obs) {
  return ConcentratedLikelihood(track, wavelength, ws, obs).evaluate(h).reflection;
}

double concentrated_loglik(const ArrayTrack& track, double wavelength, const WaveformSet& ws,
                           const Observation& obs, Point h) {
  return ConcentratedLikelihood(track, wavelength, ws, obs).evaluate(h).loglik;
}

double full_loglik(const ArrayTrack& track, const Scene& scene, const WaveformSet& ws, const Observation& obs) {
  const Eigen::VectorXcd mu = mean_vector(track, scene, ws);
  if (mu.size() != obs.stacked.size()) throw ContractError("observation size mismatch");
  const double samples = static_cast<double>(mu.size());
  return -samples * std::log(std::numbers::pi * scene.noise_power) - (obs.stacked - mu).squaredNorm() / scene.noise_power;
}

std::vector<double> uniform_axis(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ContractError("resolution must be > 0");
  if (!(hi >= lo)) throw ContractError("empty search interval");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> axis(count);
  for (long i = 0; i < count; ++i) axis[i] = lo + i * step;
  return axis;
}

LikelihoodMap grid_search(const ConcentratedLikelihood& objective, const Region& region, double resolution) {
  if (!(region.x_min > 0.0)) throw ContractError("search region must have x_min > 0");
  LikelihoodMap map;
  map.x_grid = uniform_axis(region.x_min, region.x_max, resolution);
  map.y_grid = uniform_axis(region.y_min, region.y_max, resolution);
  const auto nx = static_cast<Eigen::Index>(map.x_grid.size());
  const auto ny = static_cast<Eigen::Index>(map.y_grid.size());
  map.values.resize(nx, ny);
  map.max_value = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < ny; ++j) {
      const Point h{map.x_grid[i], map.y_grid[j]};
      const auto v = objective.evaluate(h);
      map.values(i, j) = v.loglik;
      if (!found || v.loglik > map.max_value) {
        found = true;
        map.max_value = v.loglik;
        map.argmax = h;
        map.b_at_argmax = v.reflection;
      }
    }
  }
  return map;
}

LikelihoodMap grid_search(const ArrayTrack& track, double wavelength, const WaveformSet& ws,
                          const Observation& obs, const Region& region, double resolution) {
  return grid_search(ConcentratedLikelihood(track, wavelength, ws, obs), region, resolution);
}

namespace {

struct Poller {
  const ConcentratedLikelihood& objective;
  double x_lo, x_hi, y_lo, y_hi;
  EstimateResult best;

  // Strict improvements only. Probes outside the region or without signal
  // projection count as failures.
  bool try_point(Point p) {
    if (!(p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi)) return false;
    ConcentratedLikelihood::Value v;
    try {
      v = objective.evaluate(p);
    } catch (const DegenerateHypothesisError&) {
      return false;
    }
    if (!(v.loglik > best.objective)) return false;
    best = {p, v.reflection, v.loglik, true};
    return true;
  }

  double value_at(Point p) const {
    if (!(p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi)) return std::numeric_limits<double>::quiet_NaN();
    try {
      return objective.evaluate(p).loglik;
    } catch (const DegenerateHypothesisError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
};

}  // namespace

EstimateResult refine(const LikelihoodMap& map, const ConcentratedLikelihood& objective) {
  double step = map.x_grid.size() > 1 ? map.x_grid[1] - map.x_grid[0]
                : map.y_grid.size() > 1 ? map.y_grid[1] - map.y_grid[0]
                                        : 1e-2;
  Poller poll{objective, map.x_grid.front(), map.x_grid.back(), map.y_grid.front(), map.y_grid.back(),
              {map.argmax, map.b_at_argmax, map.max_value, false}};

  // Poll directions start on the axes and are re-aligned with the principal
  // axes of the local curvature whenever a step size stalls; the likelihood
  // ridge is strongly tilted for moving arrays.
  Eigen::Vector2d dirs[2] = {Eigen::Vector2d::UnitX(), Eigen::Vector2d::UnitY()};
  bool aligned = false;
  constexpr int kMaxMoves = 100000;
  int moves = 0;
  while (step >= kRefineMinStep && moves < kMaxMoves) {
    const Point c = poll.best.position;
    bool improved = false;
    for (const auto& d : dirs) {
      if (poll.try_point({c.x + step * d.x(), c.y + step * d.y()}) ||
          poll.try_point({c.x - step * d.x(), c.y - step * d.y()}))
        improved = true;
    }
    if (improved) {
      ++moves;
      continue;
    }
    if (aligned) {
      step /= 2.0;
      aligned = false;
      continue;
    }
    const double h = step;
    const double f0 = poll.best.objective;
    const double fxp = poll.value_at({c.x + h, c.y}), fxm = poll.value_at({c.x - h, c.y});
    const double fyp = poll.value_at({c.x, c.y + h}), fym = poll.value_at({c.x, c.y - h});
    const double fpp = poll.value_at({c.x + h, c.y + h}), fpm = poll.value_at({c.x + h, c.y - h});
    const double fmp = poll.value_at({c.x - h, c.y + h}), fmm = poll.value_at({c.x - h, c.y - h});
    aligned = true;
    Eigen::Matrix2d H;
    H << (fxp + fxm - 2.0 * f0), (fpp - fpm - fmp + fmm) / 4.0, (fpp - fpm - fmp + fmm) / 4.0, (fyp + fym - 2.0 * f0);
    if (!H.allFinite()) continue;
    const Eigen::Vector2d g((fxp - fxm) / 2.0, (fyp - fym) / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(H);
    dirs[0] = eig.eigenvectors().col(0);
    dirs[1] = eig.eigenvectors().col(1);
    if (eig.eigenvalues().maxCoeff() < 0.0) {
      // quadratic model step, in units of h
      const Eigen::Vector2d n = -H.ldlt().solve(g) * h;
      if (n.norm() < 4.0 * h && poll.try_point({c.x + n.x(), c.y + n.y()})) ++moves;
    }
  }
  return poll.best;
}

void write_map_csv(std::ostream& out, const LikelihoodMap& map) {
  out << "x,y,loglik\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < map.x_grid.size(); ++i)
    for (std::size_t j = 0; j < map.y_grid.size(); ++j)
      out << map.x_grid[i] << ',' << map.y_grid[j] << ',' << map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << '\n';
  out.precision(old);
}

MonteCarloResult monte_carlo_rmse(const ArrayConfig& cfg, const Scene& scene, Scheme scheme, int trials,
                                  std::uint64_t seed, const SearchOptions& options) {
  if (trials < 1) throw ContractError("trials must be >= 1");
  cfg.validate();
  scene.validate();
  const ArrayTrack track = ArrayTrack::make(cfg, options.architecture);
  const WaveformSet ws = scheme == Scheme::sem ? sem_waveforms(track, scene) : iso_waveforms(track, scene, seed);

  MonteCarloResult result;
  result.crb_rmse = crb_closed(track, scene, ws).rmse_lower_bound();
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = substream_seed(seed, StreamDomain::trial, static_cast<std::uint64_t>(t));
    const Observation obs = synthesize(track, scene, ws, trial_seed, options.noise);
    const ConcentratedLikelihood objective(track, scene.wavelength, ws, obs);
    const LikelihoodMap map = grid_search(objective, options.region, options.resolution);
    const EstimateResult est = refine(map, objective);
    const double err = std::hypot(est.position.x - scene.target_x, est.position.y - scene.target_y);
    sum_sq += err * err;
    result.trials.push_back({t, trial_seed, est.position, err});
  }
  result.rmse = std::sqrt(sum_sq / trials);
  return result;
}

}  // namespace nfmove
