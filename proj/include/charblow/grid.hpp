#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charblow/errors.hpp"

namespace charblow {

enum class Boundary { periodic, outflow };

inline std::string_view to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "outflow"; }

inline Boundary boundary_from(std::string_view s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "outflow") return Boundary::outflow;
  throw GridError("unknown boundary mode '" + std::string(s) + "'");
}

/// Uniform grid x_i = x_lo + i dx, i = 0 .. n-1. A periodic grid identifies x_hi with x_lo.
struct Grid {
  std::size_t n = 0;
  double x_lo = 0.0;
  double x_hi = 1.0;
  Boundary bc = Boundary::periodic;

  double dx() const {
    return bc == Boundary::periodic ? (x_hi - x_lo) / static_cast<double>(n)
                                    : (x_hi - x_lo) / static_cast<double>(n - 1);
  }
  double x(std::size_t i) const { return x_lo + static_cast<double>(i) * dx(); }
  double length() const { return x_hi - x_lo; }

  void validate() const {
    if (n < 16) throw GridError("grid needs n >= 16, got " + std::to_string(n));
    if (!(x_hi > x_lo)) throw GridError("grid needs x_hi > x_lo");
  }
};

/// Snapshot of (h, u) on a grid at time t.
struct GridState {
  Grid grid;
  double t = 0.0;
  std::vector<double> h, u;
};

namespace fd {

/// d/dx of nodal values: 4th-order central inside, 2nd-order central next to an
/// outflow edge and one-sided 2nd-order on the edge itself.
inline std::vector<double> derivative(const std::vector<double>& f, const Grid& g) {
  const std::size_t n = f.size();
  if (n < 5) throw GridError("derivative stencil needs at least 5 nodes");
  const double dx = g.dx();
  std::vector<double> d(n);
  auto central4 = [&](double fm2, double fm1, double fp1, double fp2) {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * dx);
  };
  if (g.bc == Boundary::periodic) {
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = central4(f[(i + n - 2) % n], f[(i + n - 1) % n], f[(i + 1) % n], f[(i + 2) % n]);
    }
    return d;
  }
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = central4(f[i - 2], f[i - 1], f[i + 1], f[i + 2]);
  d[1] = (f[2] - f[0]) / (2.0 * dx);
  d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * dx);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return d;
}

/// Nodes where derivative() uses the 4th-order stencil.
inline bool interior(std::size_t i, const Grid& g) {
  return g.bc == Boundary::periodic || (i >= 2 && i + 2 < g.n);
}

/// Derivative at t_k from three samples at t_{k-1}, t_k, t_{k+1} (nonuniform spacing).
inline double three_point(double t0, double f0, double t1, double f1, double t2, double f2) {
  const double d1 = t1 - t0;
  const double d2 = t2 - t1;
  return -d2 / (d1 * (d1 + d2)) * f0 + (d2 - d1) / (d1 * d2) * f1 + d1 / (d2 * (d1 + d2)) * f2;
}

/// Cubic Lagrange interpolation of nodal values; nullopt outside a non-periodic grid.
inline std::optional<double> interp_cubic(const std::vector<double>& f, const Grid& g, double x) {
  const std::size_t n = f.size();
  const auto ln = static_cast<long>(n);
  double s = (x - g.x_lo) / g.dx();
  long j = 0;
  if (g.bc == Boundary::periodic) {
    s = std::fmod(s, static_cast<double>(n));
    if (s < 0) s += static_cast<double>(n);
    j = static_cast<long>(std::floor(s));
  } else {
    if (s < 0.0 || s > static_cast<double>(n - 1)) return std::nullopt;
    j = std::clamp(static_cast<long>(std::floor(s)), 1L, ln - 3);
  }
  const double th = s - static_cast<double>(j);
  auto at = [&](long k) { return f[static_cast<std::size_t>(((k % ln) + ln) % ln)]; };
  return -th * (th - 1) * (th - 2) / 6.0 * at(j - 1) + (th + 1) * (th - 1) * (th - 2) / 2.0 * at(j) -
         (th + 1) * th * (th - 2) / 2.0 * at(j + 1) + (th + 1) * th * (th - 1) / 6.0 * at(j + 2);
}

/// Wraps x into [x_lo, x_hi) on a periodic grid.
inline double wrap(double x, const Grid& g) {
  if (g.bc != Boundary::periodic) return x;
  double r = std::fmod(x - g.x_lo, g.length());
  if (r < 0) r += g.length();
  return g.x_lo + r;
}

}  // namespace fd

}  // namespace charblow
