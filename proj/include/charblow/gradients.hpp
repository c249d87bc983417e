#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "charblow/chart.hpp"
#include "charblow/grid.hpp"

// Gradient variables alpha, beta, their decoupled forms y, q, and the
// rarefaction/compression (R/C) character of a smooth solution.
namespace charblow::gradients {

struct AlphaBeta {
  double alpha = 0, beta = 0;
};

/// alpha = u_x + h_x + p_mu/c,  beta = u_x - h_x - p_mu/c.
constexpr AlphaBeta alpha_beta(double u_x, double h_x, double p_mu, double c) {
  const double s = h_x + p_mu / c;
  return {u_x + s, u_x - s};
}

struct YQ {
  double y = 0, q = 0;
};

/// y = sqrt(c) alpha - I,  q = sqrt(c) beta + I.
inline YQ y_q(double alpha, double beta, double c, double I) {
  const double sc = std::sqrt(c);
  return {sc * alpha - I, sc * beta + I};
}

/// Inverse of y_q.
inline AlphaBeta alpha_beta_from_yq(double y, double q, double c, double I) {
  const double sc = std::sqrt(c);
  return {(y + I) / sc, (q - I) / sc};
}

struct RawGradients {
  double u_x = 0, h_x = 0;
};

/// Inverse of alpha_beta.
constexpr RawGradients raw_from_alpha_beta(double alpha, double beta, double p_mu, double c) {
  return {0.5 * (alpha + beta), 0.5 * (alpha - beta) - p_mu / c};
}

enum class RC { R, C, neutral };

inline std::string_view to_string(RC r) {
  switch (r) {
    case RC::R:
      return "R";
    case RC::C:
      return "C";
    case RC::neutral:
      return "N";
  }
  return "N";
}

constexpr RC label(double s) { return s > 0.0 ? RC::R : (s < 0.0 ? RC::C : RC::neutral); }

struct RCPair {
  RC forward = RC::neutral, backward = RC::neutral;
  bool operator==(const RCPair&) const = default;
};

/// Forward label from alpha, backward from beta.
constexpr RCPair classify(double alpha, double beta) { return {label(alpha), label(beta)}; }

/// Per-node gradient diagnostics of one snapshot.
struct GradientField {
  std::vector<double> u_x, h_x, v_x;
  std::vector<double> v, c, p, p_mu, I;
  std::vector<double> alpha, beta, y, q;
  std::vector<RCPair> rc;
};

inline GradientField compute(const GridState& s, const coords::Chart& chart) {
  const std::size_t n = s.h.size();
  GradientField f;
  f.u_x = fd::derivative(s.u, s.grid);
  f.h_x = fd::derivative(s.h, s.grid);
  f.v_x.resize(n);
  f.v.resize(n);
  f.c.resize(n);
  f.p.resize(n);
  f.p_mu.resize(n);
  f.I.resize(n);
  f.alpha.resize(n);
  f.beta.resize(n);
  f.y.resize(n);
  f.q.resize(n);
  f.rc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const coords::ChartQuantities q = chart.at(s.h[i], s.grid.x(i));
    f.v[i] = q.v;
    f.c[i] = q.c;
    f.p[i] = q.p;
    f.p_mu[i] = q.p_mu;
    f.I[i] = q.I;
    // v = v(h, mu): v_h = -1/c, v_mu = h_xbar / c.
    f.v_x[i] = (q.h_xbar - f.h_x[i]) / q.c;
    const AlphaBeta ab = alpha_beta(f.u_x[i], f.h_x[i], q.p_mu, q.c);
    f.alpha[i] = ab.alpha;
    f.beta[i] = ab.beta;
    const YQ yq = y_q(ab.alpha, ab.beta, q.c, q.I);
    f.y[i] = yq.y;
    f.q[i] = yq.q;
    f.rc[i] = classify(ab.alpha, ab.beta);
  }
  return f;
}

struct DirectionalResiduals {
  double forward = 0;   // max |p' + c u'|
  double backward = 0;  // max |p` - c u`|
};

/// Residuals with time derivatives taken from the right-hand side of
/// h_t + c u_x = 0, u_t + c h_x + p_mu = 0.
inline DirectionalResiduals directional_residuals(const GridState& s, const coords::Chart& chart) {
  const std::size_t n = s.h.size();
  if (n < 5) throw GridError("directional residuals need at least 5 nodes");
  std::vector<double> p(n), c(n), pmu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const coords::ChartQuantities q = chart.at(s.h[i], s.grid.x(i));
    p[i] = q.p;
    c[i] = q.c;
    pmu[i] = q.p_mu;
  }
  const auto p_x = fd::derivative(p, s.grid);
  const auto u_x = fd::derivative(s.u, s.grid);
  const auto h_x = fd::derivative(s.h, s.grid);
  DirectionalResiduals r;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fd::interior(i, s.grid)) continue;
    const double p_t = -c[i] * c[i] * u_x[i];
    const double u_t = -(c[i] * h_x[i] + pmu[i]);
    r.forward = std::max(r.forward, std::abs(p_t + c[i] * p_x[i] + c[i] * (u_t + c[i] * u_x[i])));
    r.backward = std::max(r.backward, std::abs(p_t - c[i] * p_x[i] - c[i] * (u_t - c[i] * u_x[i])));
  }
  return r;
}

/// Residuals with time derivatives taken from three stored solution levels
/// (the middle one is the evaluation level).
inline DirectionalResiduals directional_residuals(const GridState& prev, const GridState& cur,
                                                  const GridState& next, const coords::Chart& chart) {
  const std::size_t n = cur.h.size();
  if (n < 5) throw GridError("directional residuals need at least 5 nodes");
  if (prev.h.size() != n || next.h.size() != n) throw GridError("levels differ in size");
  std::vector<double> p0(n), p1(n), p2(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cur.grid.x(i);
    p0[i] = chart.pressure_and_speed(prev.h[i], x).first;
    const auto pc = chart.pressure_and_speed(cur.h[i], x);
    p1[i] = pc.first;
    c[i] = pc.second;
    p2[i] = chart.pressure_and_speed(next.h[i], x).first;
  }
  const auto p_x = fd::derivative(p1, cur.grid);
  const auto u_x = fd::derivative(cur.u, cur.grid);
  DirectionalResiduals r;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fd::interior(i, cur.grid)) continue;
    const double p_t = fd::three_point(prev.t, p0[i], cur.t, p1[i], next.t, p2[i]);
    const double u_t = fd::three_point(prev.t, prev.u[i], cur.t, cur.u[i], next.t, next.u[i]);
    r.forward = std::max(r.forward, std::abs(p_t + c[i] * p_x[i] + c[i] * (u_t + c[i] * u_x[i])));
    r.backward = std::max(r.backward, std::abs(p_t - c[i] * p_x[i] - c[i] * (u_t - c[i] * u_x[i])));
  }
  return r;
}

/// Predicted sign of beta` where beta = 0: sign(alpha (p_mu/c)_h).
constexpr int rc_transition_sign(double alpha, double g_h) {
  const double s = alpha * g_h;
  return s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
}

struct ConsistencyResult {
  double lhs = 0, rhs = 0, diff = 0;
};

/// (p_xbar/p_v)_v against (2/c) c_x on a curve with p_x = 0, i.e. v_x = -p_xbar/p_v.
inline ConsistencyResult rc_consistency_check(const PressureLaw& law, double v, double xbar) {
  const PressureDerivs d = law.eval(v, xbar);
  ConsistencyResult r;
  r.lhs = d.p_xv / d.p_v - d.p_x * d.p_vv / (d.p_v * d.p_v);
  const double v_x = -d.p_x / d.p_v;
  const double c_x = d.c_v * v_x + d.c_x;
  r.rhs = 2.0 / d.c * c_x;
  r.diff = std::abs(r.lhs - r.rhs);
  return r;
}

}  // namespace charblow::gradients
