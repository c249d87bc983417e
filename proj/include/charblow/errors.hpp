#pragma once

#include <stdexcept>
#include <string>

namespace charblow {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation outside a law's validity domain, or outside the image of a chart.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A sign condition (p_v < 0, p_vv > 0, c_h > 0, a2 > 0) failed.
class HyperbolicityError : public Error {
 public:
  using Error::Error;
};

/// Ill-posed model parameters (gamma <= 1, non-positive B, divergent integral).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Grid too small for a stencil, or history too short for a diagnostic.
class GridError : public Error {
 public:
  using Error::Error;
};

/// The solution left the compact set K during time stepping.
class DomainExitError : public Error {
 public:
  DomainExitError(const std::string& what, std::size_t node, double t)
      : Error(what), node_(node), t_(t) {}
  std::size_t node() const noexcept { return node_; }
  double time() const noexcept { return t_; }

 private:
  std::size_t node_;
  double t_;
};

/// NaN or Inf appeared in a field.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Adaptive ODE integration could not meet its tolerance.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of the requested bound is not met, so it does not apply.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

}  // namespace charblow
