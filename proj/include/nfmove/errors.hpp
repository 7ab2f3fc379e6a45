#pragma once

#include <stdexcept>
#include <string>

namespace nfmove {

/// Index outside the documented 0-based range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inputs that violate a structural contract (dimension mismatch, empty set).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fisher information too ill-conditioned to invert reliably.
class SingularFimError : public std::runtime_error {
 public:
  SingularFimError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Geometry carries no localization information (zero aperture, empty pair sums).
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimator hypothesis with no signal projection (all a^T s vanish).
class DegenerateHypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nfmove
