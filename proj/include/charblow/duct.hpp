#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "charblow/errors.hpp"
#include "charblow/grid.hpp"
#include "charblow/profile.hpp"
#include "charblow/solver.hpp"

// Polytropic gas in a duct of area a(x~), in Lagrangian mass coordinate x with
//   v^ = 1/(a rho) = K_v z^{-2/(gamma-1)},  m = e^{S/(2 c_v)},
//   z_t + K_c z^{(gamma+1)/(gamma-1)} u_x = 0,  u_t + a p_x = 0,  m_t = 0,
// and X = x~ carried along with X_t = u.
namespace charblow::duct {

/// Gas constants and the derived K_v, K_p, K_c.
struct Gas {
  double gamma = 1.4, K = 1.0, cv = 1.0;
  double K_v = 0, K_p = 0, K_c = 0;

  Gas() : Gas(1.4, 1.0, 1.0) {}
  Gas(double g, double k, double c) : gamma(g), K(k), cv(c) {
    if (!(g > 1.0)) throw ModelError("duct gas needs gamma > 1");
    if (!(k > 0.0) || !(c > 0.0)) throw ModelError("duct gas needs K > 0 and c_v > 0");
    K_v = std::pow(2.0 * std::sqrt(K * gamma) / (gamma - 1.0), 2.0 / (gamma - 1.0));
    K_p = K * std::pow(K_v, -gamma);
    K_c = std::sqrt(K * gamma) * std::pow(K_v, -0.5 * (gamma + 1.0));
  }

  double z_of_v(double v) const { return 2.0 * std::sqrt(K * gamma) / (gamma - 1.0) * std::pow(v, -0.5 * (gamma - 1.0)); }
  double v_of_z(double z) const { return K_v * std::pow(z, -2.0 / (gamma - 1.0)); }
  double m_of_S(double S) const { return std::exp(S / (2.0 * cv)); }
  double S_of_m(double m) const { return 2.0 * cv * std::log(m); }

  double pressure(double z, double m, double a) const {
    return K_p * std::pow(a, -gamma) * m * m * std::pow(z, 2.0 * gamma / (gamma - 1.0));
  }
  double speed(double z, double m, double a) const {
    return K_c * std::pow(a, -0.5 * (gamma - 1.0)) * m * std::pow(z, (gamma + 1.0) / (gamma - 1.0));
  }
  /// c = sqrt(-a p_v^) from v^ and S directly.
  double speed_direct(double v, double S, double a) const {
    return std::sqrt(K * gamma) * std::pow(a, -0.5 * (gamma - 1.0)) * std::pow(v, -0.5 * (gamma + 1.0)) *
           std::exp(S / (2.0 * cv));
  }
};

struct ZM {
  double z = 0, m = 0;
};

inline ZM zm_transform(const Gas& gas, double v, double S) {
  if (!(v > 0.0)) throw DomainError("duct: v^ must be positive");
  return {gas.z_of_v(v), gas.m_of_S(S)};
}

struct VS {
  double v = 0, S = 0;
};

inline VS zm_inverse(const Gas& gas, double z, double m) { return {gas.v_of_z(z), gas.S_of_m(m)}; }

/// Node data entering the gradient dynamics.
struct Node {
  double z = 0, m = 0, u = 0;
  double a = 1, a_dot = 0, a_ddot = 0;
};

struct DuctCoefficients {
  double k1 = 0, k2 = 0, k3 = 0;
  double k3_backward = 0;
  double A = 0;
};

/// Derived right-hand sides, or a variant with a (gamma-1)^3 lead in k3 and
/// -k1(...) - A in the beta equation (kept only so tests can show it is
/// inconsistent with the PDE).
enum class RhsForm { derived, variant };

inline DuctCoefficients duct_coeffs(const Gas& gas, const Node& n, double m_x,
                                    RhsForm form = RhsForm::derived) {
  const double g = gas.gamma;
  const double gm = g - 1.0;
  DuctCoefficients k;
  k.k1 = (g + 1.0) / (2.0 * gm) * gas.K_c * std::pow(n.z, 2.0 / gm);
  k.k2 = gm / (g * (g + 1.0)) * m_x * n.z * std::pow(n.a, -0.5 * gm);
  const double lead = (form == RhsForm::derived ? 3.0 * gm * gm / 8.0 : 3.0 * gm * gm * gm / 8.0) * n.m * n.z *
                      std::pow(n.a, -0.5 * (g + 1.0)) * n.a_dot;
  const double drift = gm / 4.0 * n.u * n.a_dot / n.a;
  k.k3 = lead - drift;
  k.k3_backward = lead + drift;
  k.A = gm * gm * gm / (8.0 * gas.K_c) * n.m * n.m * std::pow(n.z, (2.0 * g - 4.0) / gm) *
            std::pow(n.a, -g - 1.0) * (n.a * n.a_ddot - g * n.a_dot * n.a_dot) +
        gm * gm / (2.0 * g) * n.m * m_x * n.z * n.z * std::pow(n.a, -g) * n.a_dot;
  return k;
}

struct AlphaBetaRhs {
  double alpha = 0, beta = 0;
  double alpha_rhs = 0, beta_rhs = 0;
};

/// alpha, beta from (u_x, z_x, m_x) and their right-hand sides along the
/// forward and backward characteristics.
inline AlphaBetaRhs duct_alpha_beta(const Gas& gas, const Node& n, double u_x, double z_x, double m_x,
                                    RhsForm form = RhsForm::derived) {
  const double g = gas.gamma;
  const double w = std::pow(n.a, -0.5 * (g - 1.0)) * (n.m * z_x + (g - 1.0) / g * m_x * n.z);
  AlphaBetaRhs r;
  r.alpha = u_x + w;
  r.beta = u_x - w;
  const DuctCoefficients k = duct_coeffs(gas, n, m_x, form);
  const double al = r.alpha, be = r.beta;
  r.alpha_rhs = k.k1 * (k.k2 * (3.0 * al + be) + (al * be - al * al)) + k.k3 * (al - be) + k.A;
  if (form == RhsForm::derived) {
    r.beta_rhs = -k.k1 * k.k2 * (3.0 * be + al) + k.k1 * (al * be - be * be) + k.k3_backward * (al - be) + k.A;
  } else {
    r.beta_rhs = -k.k1 * (k.k2 * (3.0 * be + al) + (al * be - be * be)) + k.k3 * (be - al) - k.A;
  }
  return r;
}

// ------------------------------------------------------------------- solver

/// Fields (z, u, X) with the entropy variable m frozen per node.
struct DuctSystem {
  static constexpr std::size_t N = 3;
  Gas gas;
  Profile area;
  Grid grid;
  std::vector<double> m;

  void rates(const solver::Fields<3>& q, double, int dir, solver::Fields<3>& out) const {
    const std::size_t n = q[0].size();
    const double e = (gas.gamma + 1.0) / (gas.gamma - 1.0);
    std::vector<double> P(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = area(q[2][i]).f;
      P[i] = gas.pressure(q[0][i], m[i], a[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      out[0][i] = -gas.K_c * std::pow(q[0][i], e) * solver::one_sided(q[1], i, dir, grid);
      out[1][i] = -a[i] * solver::one_sided(P, i, dir, grid);
      out[2][i] = q[1][i];
    }
  }

  double max_speed(const solver::Fields<3>& q) const {
    double c = 0.0;
    for (std::size_t i = 0; i < q[0].size(); ++i) c = std::max(c, gas.speed(q[0][i], m[i], area(q[2][i]).f));
    return c;
  }

  void validate(const solver::Fields<3>& q, double t) const {
    for (std::size_t i = 0; i < q[0].size(); ++i) {
      const double a = area(q[2][i]).f;
      if (!std::isfinite(q[0][i]) || !std::isfinite(q[1][i]) || !std::isfinite(q[2][i])) {
        std::ostringstream os;
        os << "duct: non-finite value at node " << i << ", t = " << t;
        throw NumericalError(os.str());
      }
      if (!(q[0][i] > 0.0) || !(a > 0.0)) {
        std::ostringstream os;
        os << "duct: z or a left (0, inf) at node " << i << ", t = " << t;
        throw DomainExitError(os.str(), i, t);
      }
    }
  }
};

struct DuctLevel {
  double t = 0;
  std::vector<double> z, u, X;
};

/// Smooth initial data: v^ = v0 + amp sech^2((x - c)/w), u = u_amp e^{-((x - c)/w)^2},
/// S = entropy(x), and X = X_lo + \int v^ dx in closed form.
struct DuctInitial {
  double v0 = 1.0;
  double amp = 0.1;
  double u_amp = 0.0;
  double center = 0.0;
  double width = 1.0;
  double X_lo = 0.0;
  Profile entropy = Profile::constant(0.0);
};

struct DuctRun {
  Gas gas;
  Profile area;
  Grid grid;
  std::vector<double> m;
  std::vector<DuctLevel> history;
  std::size_t steps = 0;
};

inline DuctLevel initial_level(const Gas& gas, const Grid& g, const DuctInitial& in, std::vector<double>& m) {
  DuctLevel L;
  const std::size_t n = g.n;
  L.z.resize(n);
  L.u.resize(n);
  L.X.resize(n);
  m.resize(n);
  const double t0 = std::tanh((g.x_lo - in.center) / in.width);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.x(i);
    const double s = (x - in.center) / in.width;
    const double th = std::tanh(s);
    const double v = in.v0 + in.amp * (1.0 - th * th);
    L.z[i] = gas.z_of_v(v);
    L.u[i] = in.u_amp * std::exp(-s * s);
    L.X[i] = in.X_lo + in.v0 * (x - g.x_lo) + in.amp * in.width * (th - t0);
    m[i] = gas.m_of_S(in.entropy(x).f);
  }
  return L;
}

inline DuctRun run_duct(const Gas& gas, const Profile& area, const Grid& g, const DuctInitial& in,
                        double t_max, double cfl = 0.5) {
  g.validate();
  if (!(cfl > 0.0 && cfl <= 0.9)) throw GridError("cfl must lie in (0, 0.9]");
  DuctRun run;
  run.gas = gas;
  run.area = area;
  run.grid = g;
  DuctLevel L0 = initial_level(gas, g, in, run.m);
  DuctSystem sys{gas, area, g, run.m};
  solver::Fields<3> q{L0.z, L0.u, L0.X};
  sys.validate(q, 0.0);
  run.history.push_back(L0);
  double t = 0.0;
  while (t < t_max) {
    double dt = cfl * g.dx() / sys.max_speed(q);
    bool last = false;
    if (t + dt >= t_max) {
      dt = t_max - t;
      last = true;
    }
    solver::maccormack_step(sys, q, t, dt);
    t = last ? t_max : t + dt;
    ++run.steps;
    run.history.push_back({t, q[0], q[1], q[2]});
  }
  return run;
}

struct MetricResiduals {
  double a_t = 0;       // a_t - u a'
  double a_x = 0;       // a_x - v^ a'
  double adot_t = 0;    // (a')_t - u a''
  double adot_x = 0;    // (a')_x - v^ a''
  double max() const { return std::max({a_t, a_x, adot_t, adot_x}); }
};

/// Finite-difference residuals of the metric identities over every interior
/// level and interior node of a stored duct run.
inline MetricResiduals metric_identities_residual(const DuctRun& run) {
  const auto& H = run.history;
  if (H.size() < 3) throw GridError("metric identities need at least 3 stored levels");
  const Grid& g = run.grid;
  const std::size_t n = g.n;
  MetricResiduals r;
  auto field = [&](const DuctLevel& L, int order) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const ProfileValue a = run.area(L.X[i]);
      f[i] = order == 0 ? a.f : a.df;
    }
    return f;
  };
  for (std::size_t k = 1; k + 1 < H.size(); ++k) {
    const auto a0 = field(H[k - 1], 0), a1 = field(H[k], 0), a2 = field(H[k + 1], 0);
    const auto d0 = field(H[k - 1], 1), d1 = field(H[k], 1), d2 = field(H[k + 1], 1);
    const auto a_x = fd::derivative(a1, g);
    const auto d_x = fd::derivative(d1, g);
    for (std::size_t i = 0; i < n; ++i) {
      if (!fd::interior(i, g)) continue;
      const ProfileValue a = run.area(H[k].X[i]);
      const double v = run.gas.v_of_z(H[k].z[i]);
      const double u = H[k].u[i];
      const double at = fd::three_point(H[k - 1].t, a0[i], H[k].t, a1[i], H[k + 1].t, a2[i]);
      const double dt = fd::three_point(H[k - 1].t, d0[i], H[k].t, d1[i], H[k + 1].t, d2[i]);
      r.a_t = std::max(r.a_t, std::abs(at - u * a.df));
      r.a_x = std::max(r.a_x, std::abs(a_x[i] - v * a.df));
      r.adot_t = std::max(r.adot_t, std::abs(dt - u * a.d2f));
      r.adot_x = std::max(r.adot_x, std::abs(d_x[i] - v * a.d2f));
    }
  }
  return r;
}

struct DuctTraceResult {
  double max_alpha_residual = 0;
  double max_beta_residual = 0;
  std::size_t samples = 0;
  bool truncated = false;
};

/// Follows forward (dx/dt = c) and backward (dx/dt = -c) characteristics from x0
/// and measures alpha' and beta` against duct_alpha_beta.
inline DuctTraceResult trace_alpha_residual(const DuctRun& run, double x0, RhsForm form = RhsForm::derived) {
  const auto& H = run.history;
  if (H.size() < 3) throw GridError("tracing needs at least 3 stored levels");
  const Grid& g = run.grid;
  const std::size_t n = g.n;
  const auto m_x = fd::derivative(run.m, g);
  struct Lv {
    std::vector<double> c, u_x, z_x, z, u, X;
  };
  std::vector<Lv> lv(H.size());
  for (std::size_t k = 0; k < H.size(); ++k) {
    lv[k].c.resize(n);
    for (std::size_t i = 0; i < n; ++i) lv[k].c[i] = run.gas.speed(H[k].z[i], run.m[i], run.area(H[k].X[i]).f);
    lv[k].u_x = fd::derivative(H[k].u, g);
    lv[k].z_x = fd::derivative(H[k].z, g);
    lv[k].z = H[k].z;
    lv[k].u = H[k].u;
    lv[k].X = H[k].X;
  }
  DuctTraceResult res;
  for (double sgn : {1.0, -1.0}) {
    struct S {
      double t, ab, rhs;
    };
    std::vector<S> samples;
    double x = x0;
    auto sample = [&](std::size_t k) -> bool {
      auto I = [&](const std::vector<double>& f) { return fd::interp_cubic(f, g, x); };
      const auto z = I(lv[k].z), u = I(lv[k].u), X = I(lv[k].X), ux = I(lv[k].u_x), zx = I(lv[k].z_x),
                 m = I(run.m), mx = I(m_x);
      if (!z || !u || !X || !ux || !zx || !m || !mx) return false;
      const ProfileValue a = run.area(*X);
      const Node nd{*z, *m, *u, a.f, a.df, a.d2f};
      const auto ab = duct_alpha_beta(run.gas, nd, *ux, *zx, *mx, form);
      samples.push_back({H[k].t, sgn > 0 ? ab.alpha : ab.beta, sgn > 0 ? ab.alpha_rhs : ab.beta_rhs});
      return true;
    };
    auto speed = [&](std::size_t k, double xx, double th) -> std::optional<double> {
      const auto c0 = fd::interp_cubic(lv[k].c, g, xx);
      const auto c1 = fd::interp_cubic(lv[k + 1].c, g, xx);
      if (!c0 || !c1) return std::nullopt;
      return sgn * ((1.0 - th) * *c0 + th * *c1);
    };
    if (!sample(0)) {
      res.truncated = true;
      continue;
    }
    for (std::size_t k = 0; k + 1 < H.size(); ++k) {
      const double dt = H[k + 1].t - H[k].t;
      const auto k1 = speed(k, x, 0.0);
      const auto k2 = k1 ? speed(k, x + 0.5 * dt * *k1, 0.5) : std::nullopt;
      const auto k3 = k2 ? speed(k, x + 0.5 * dt * *k2, 0.5) : std::nullopt;
      const auto k4 = k3 ? speed(k, x + dt * *k3, 1.0) : std::nullopt;
      if (!k4) {
        res.truncated = true;
        break;
      }
      x += dt / 6.0 * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
      if (!sample(k + 1)) {
        res.truncated = true;
        break;
      }
    }
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
      const double d = fd::three_point(samples[k - 1].t, samples[k - 1].ab, samples[k].t, samples[k].ab,
                                       samples[k + 1].t, samples[k + 1].ab);
      double& slot = sgn > 0 ? res.max_alpha_residual : res.max_beta_residual;
      slot = std::max(slot, std::abs(d - samples[k].rhs));
    }
    res.samples += samples.size();
  }
  return res;
}

}  // namespace charblow::duct
