#pragma once

#include <cmath>

#include "charblow/profile.hpp"

// Closed forms for transverse MHD with gamma = 2, p = B(mu) v^{-2}, h0 = 0.
// Written directly in (h, B, B', B'') so they can serve as an oracle for the
// general chart machinery.
namespace charblow::mhd {

struct ClosedForm {
  double v = 0, p = 0, c = 0;
  double g = 0;  // p_mu / c
  double I = 0;
  double a0 = 0, a1 = 0, a2 = 0;
  double G = 0;  // 1 - (5/6) B B'' / B'^2, NaN when B' = 0
};

inline double h_of_v(double v, double B) { return 2.0 * std::sqrt(2.0) * std::sqrt(B) / std::sqrt(v); }
inline double v_of_h(double h, double B) { return 8.0 * B / (h * h); }
inline double pressure(double h, double B) { return h * h * h * h / (64.0 * B); }
inline double speed(double h, double B) { return h * h * h / (16.0 * B); }

inline ClosedForm closed_form(double h, const ProfileValue& b) {
  const double B = b.f, dB = b.df, d2B = b.d2f;
  ClosedForm r;
  r.v = v_of_h(h, B);
  r.p = pressure(h, B);
  r.c = speed(h, B);
  r.g = -h / 4.0 * dB / B;
  r.I = -1.0 / 80.0 * dB / std::pow(B, 1.5) * std::pow(h, 2.5);
  r.a2 = 3.0 / 8.0 * std::sqrt(h) / std::sqrt(B);
  r.a1 = 1.0 / 40.0 * dB / (B * B) * h * h * h;
  r.a0 = std::pow(h, 5.5) / 1280.0 * (d2B / std::pow(B, 2.5) - 1.2 * dB * dB / std::pow(B, 3.5));
  r.G = dB != 0.0 ? 1.0 - 5.0 / 6.0 * B * d2B / (dB * dB) : std::nan("");
  return r;
}

/// y = h^{3/2} / (4 sqrt B) (u_x + h_x - (h/5) B'/B).
inline double y_of(double h, double u_x, double h_x, const ProfileValue& b) {
  return std::pow(h, 1.5) / (4.0 * std::sqrt(b.f)) * (u_x + h_x - h / 5.0 * b.df / b.f);
}

/// q = h^{3/2} / (4 sqrt B) (u_x - h_x + (h/5) B'/B).
inline double q_of(double h, double u_x, double h_x, const ProfileValue& b) {
  return std::pow(h, 1.5) / (4.0 * std::sqrt(b.f)) * (u_x - h_x + h / 5.0 * b.df / b.f);
}

}  // namespace charblow::mhd
