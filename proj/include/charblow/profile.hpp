#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "charblow/errors.hpp"

namespace charblow {

/// Value and first two derivatives of a smooth scalar profile at one point.
struct ProfileValue {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

enum class ProfileKind { constant, linear, sinusoidal, tanh_step };

/// Smooth scalar profile used for entropy S(x), the MHD coefficient B(x) and duct areas.
///
///   constant    f = c0
///   linear      f = c0 + amp * (x - center)
///   sinusoidal  f = c0 + amp * sin(k x + phase)
///   tanh_step   f = c0 + amp * tanh((x - center) / width)
struct Profile {
  ProfileKind kind = ProfileKind::constant;
  double c0 = 0.0;
  double amp = 0.0;
  double k = 1.0;
  double phase = 0.0;
  double center = 0.0;
  double width = 1.0;

  static Profile constant(double c0) { return {ProfileKind::constant, c0}; }
  static Profile linear(double c0, double slope, double center = 0.0) {
    Profile p{ProfileKind::linear, c0, slope};
    p.center = center;
    return p;
  }
  static Profile sinusoidal(double c0, double amp, double k = 1.0, double phase = 0.0) {
    return {ProfileKind::sinusoidal, c0, amp, k, phase};
  }
  static Profile tanh_step(double c0, double amp, double center = 0.0, double width = 1.0) {
    Profile p{ProfileKind::tanh_step, c0, amp};
    p.center = center;
    p.width = width;
    return p;
  }

  ProfileValue operator()(double x) const {
    switch (kind) {
      case ProfileKind::constant:
        return {c0, 0.0, 0.0};
      case ProfileKind::linear:
        return {c0 + amp * (x - center), amp, 0.0};
      case ProfileKind::sinusoidal: {
        const double arg = k * x + phase;
        const double s = std::sin(arg);
        const double c = std::cos(arg);
        return {c0 + amp * s, amp * k * c, -amp * k * k * s};
      }
      case ProfileKind::tanh_step: {
        const double z = (x - center) / width;
        const double th = std::tanh(z);
        const double sech2 = 1.0 - th * th;
        return {c0 + amp * th, amp * sech2 / width, -2.0 * amp * th * sech2 / (width * width)};
      }
    }
    return {};
  }

  /// True when the profile carries no x-dependence.
  bool is_constant() const {
    return kind == ProfileKind::constant || amp == 0.0;
  }

  /// Smallest value over [lo, hi], exact for every preset.
  double min_on(double lo, double hi) const {
    switch (kind) {
      case ProfileKind::constant:
        return c0;
      case ProfileKind::linear:
        return std::min((*this)(lo).f, (*this)(hi).f);
      case ProfileKind::tanh_step:
        return std::min((*this)(lo).f, (*this)(hi).f);
      case ProfileKind::sinusoidal: {
        double m = std::min((*this)(lo).f, (*this)(hi).f);
        // Interior extrema sit at k x + phase = pi/2 + n pi.
        if (k != 0.0) {
          const double a = std::min(k * lo + phase, k * hi + phase);
          const double b = std::max(k * lo + phase, k * hi + phase);
          const double pi = std::numbers::pi;
          for (double n = std::ceil((a - pi / 2) / pi); pi / 2 + n * pi <= b; n += 1.0) {
            const double x = (pi / 2 + n * pi - phase) / k;
            m = std::min(m, (*this)(x).f);
          }
        }
        return m;
      }
    }
    return c0;
  }
};

inline std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::constant:
      return "constant";
    case ProfileKind::linear:
      return "linear";
    case ProfileKind::sinusoidal:
      return "sinusoidal";
    case ProfileKind::tanh_step:
      return "tanh";
  }
  return "constant";
}

inline ProfileKind profile_kind_from(std::string_view name) {
  if (name == "constant") return ProfileKind::constant;
  if (name == "linear") return ProfileKind::linear;
  if (name == "sinusoidal" || name == "sin") return ProfileKind::sinusoidal;
  if (name == "tanh" || name == "tanh_step") return ProfileKind::tanh_step;
  throw ModelError("unknown profile preset '" + std::string(name) + "'");
}

}  // namespace charblow
