#include "nfmove/rng.hpp"

#include <cmath>
#include <numbers>

namespace nfmove {

double GaussianStream::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianStream::standard_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform_open();
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

std::complex<double> GaussianStream::cscg(double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double re = standard_normal();
  const double im = standard_normal();
  return {scale * re, scale * im};
}

}  // namespace nfmove
