#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "charblow/chart.hpp"
#include "charblow/errors.hpp"

// Riccati coefficients of the decoupled gradient equations
//   y' = a0 + a1 y - a2 y^2,   q` = a0 - a1 q - a2 q^2,
// phase-line analysis, the blowup threshold N and the lifespan bound.
namespace charblow::riccati {

struct RiccatiCoefficients {
  double a0 = 0, a1 = 0, a2 = 0;
  double h = 0, mu = 0, h0 = 0;
};

/// Coefficients from precomputed chart quantities.
inline RiccatiCoefficients coefficients(const coords::ChartQuantities& q) {
  if (!(q.c_h > 0.0)) {
    std::ostringstream os;
    os << "c_h = " << q.c_h << " <= 0 at (h=" << q.h << ", mu=" << q.mu << ")";
    throw HyperbolicityError(os.str());
  }
  const double sc = std::sqrt(q.c);
  RiccatiCoefficients r;
  r.h = q.h;
  r.mu = q.mu;
  r.h0 = q.h0;
  r.a2 = q.c_h / (2.0 * sc);
  r.a1 = -q.c_h / sc * q.I - q.c * q.g_h;
  r.a0 = -q.c * q.I_mu + 0.5 * sc * q.g_h * q.p_mu - q.c * q.g_h * q.I - r.a2 * q.I * q.I;
  return r;
}

inline RiccatiCoefficients coefficients(const coords::Chart& chart, double h, double mu) {
  return coefficients(chart.at(h, mu));
}

inline RiccatiCoefficients coefficients(const PressureLaw& law, double h, double mu, double h0) {
  return coefficients(*coords::make_chart(law, h0, 0), h, mu);
}

/// alpha' along forward characteristics.
inline double alpha_rhs(const coords::ChartQuantities& q, double alpha, double beta) {
  return -0.5 * q.c * q.g_h * (3.0 * alpha + beta) + 0.5 * q.c_h * (alpha * beta - alpha * alpha);
}

/// beta` along backward characteristics (mirror of alpha_rhs under x -> -x).
inline double beta_rhs(const coords::ChartQuantities& q, double alpha, double beta) {
  return 0.5 * q.c * q.g_h * (3.0 * beta + alpha) + 0.5 * q.c_h * (alpha * beta - beta * beta);
}

enum class Branch { plus, minus };

struct PhaseLine {
  double nu = 0;
  Branch branch = Branch::plus;
  double discriminant = 0;
  bool real_roots = false;
  double xi1 = 0, xi2 = 0;

  /// psi^nu_(+/-)(xi) = a0 +/- a1 xi - (1 - nu) a2 xi^2.
  double a0 = 0, a1 = 0, a2 = 0;
  double psi(double xi) const {
    const double s = branch == Branch::plus ? 1.0 : -1.0;
    return a0 + s * a1 * xi - (1.0 - nu) * a2 * xi * xi;
  }
};

inline PhaseLine phase_roots(double a0, double a1, double a2, double nu, Branch branch) {
  PhaseLine pl;
  pl.nu = nu;
  pl.branch = branch;
  pl.a0 = a0;
  pl.a1 = a1;
  pl.a2 = a2;
  const double s = branch == Branch::plus ? 1.0 : -1.0;
  const double k = 1.0 - nu;
  pl.discriminant = a1 * a1 + 4.0 * k * a0 * a2;
  if (pl.discriminant >= 0.0) {
    pl.real_roots = true;
    const double sq = std::sqrt(pl.discriminant);
    const double r1 = (s * a1 - sq) / (2.0 * k * a2);
    const double r2 = (s * a1 + sq) / (2.0 * k * a2);
    pl.xi1 = std::min(r1, r2);
    pl.xi2 = std::max(r1, r2);
  }
  return pl;
}

inline PhaseLine phase_roots(const RiccatiCoefficients& c, double nu, Branch branch) {
  return phase_roots(c.a0, c.a1, c.a2, nu, branch);
}

/// Bounds of the coefficients over a compact set of chart points.
struct CoefficientBounds {
  double sup_a1 = 0;       // sup |a1|
  double sup_a0_plus = 0;  // sup max(a0, 0)
  double sup_a2 = 0;
  double inf_a2 = std::numeric_limits<double>::infinity();

  void add(const RiccatiCoefficients& c) {
    sup_a1 = std::max(sup_a1, std::abs(c.a1));
    sup_a0_plus = std::max(sup_a0_plus, std::max(c.a0, 0.0));
    sup_a2 = std::max(sup_a2, c.a2);
    inf_a2 = std::min(inf_a2, c.a2);
  }
};

/// Bounds on the box [h_lo, h_hi] x [mu_lo, mu_hi], sampled on a tensor grid.
inline CoefficientBounds sample_bounds(const coords::Chart& chart, double h_lo, double h_hi,
                                       double mu_lo, double mu_hi, int nh = 64, int nmu = 256) {
  CoefficientBounds b;
  for (int j = 0; j < nmu; ++j) {
    const double mu = nmu == 1 ? mu_lo : mu_lo + (mu_hi - mu_lo) * j / (nmu - 1);
    for (int i = 0; i < nh; ++i) {
      const double h = nh == 1 ? h_lo : h_lo + (h_hi - h_lo) * i / (nh - 1);
      b.add(coefficients(chart, h, mu));
    }
  }
  return b;
}

/// Uniform lower bound N <= 0 for the real roots of both psi branches.
inline double threshold_N(const CoefficientBounds& b, double nu) {
  if (!(b.inf_a2 > 0.0)) throw HyperbolicityError("inf a2 must be positive for the threshold");
  if (!(nu > 0.0 && nu < 1.0)) throw ModelError("nu must lie in (0, 1)");
  if (b.sup_a1 == 0.0 && b.sup_a0_plus == 0.0) return 0.0;
  const double k = 1.0 - nu;
  return -(b.sup_a1 + std::sqrt(b.sup_a1 * b.sup_a1 + 4.0 * k * b.sup_a0_plus * b.sup_a2)) /
         (2.0 * k * b.inf_a2);
}

/// T_pred = -1 / (nu a2_lower y0), valid when y0 < N.
inline double lifespan_bound(double y0, double N, double a2_lower, double nu) {
  if (!(y0 < N)) {
    std::ostringstream os;
    os << "y0 = " << y0 << " is not below the threshold N = " << N;
    throw NotApplicable(os.str());
  }
  if (!(a2_lower > 0.0)) throw HyperbolicityError("lower bound of a2 must be positive");
  return -1.0 / (nu * a2_lower * y0);
}

struct Coeffs {
  double a0 = 0, a1 = 0, a2 = 0;
};
using CoefficientHistory = std::function<Coeffs(double)>;

struct ReferenceOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double blowup_value = 1e8;
  double dt0 = 1e-3;
  double min_dt = 1e-14;
};

struct Trajectory {
  std::vector<double> t, value;
  bool blowup = false;
  double t_blowup = std::numeric_limits<double>::quiet_NaN();
  double final_value() const { return value.back(); }
};

namespace detail {

/// Adaptive dopri5 loop; stop(x) ends the run early (returns true to stop).
template <class State, class Rhs, class Record, class Stop>
void integrate_controlled(const Rhs& rhs, State& x, double t0, double t_end,
                          const ReferenceOptions& opt, const Record& record, const Stop& stop) {
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  double t = t0;
  double dt = std::min(opt.dt0, t_end - t0);
  record(t, x);
  while (t < t_end) {
    if (stop(x)) return;
    dt = std::min(dt, t_end - t);
    const double t_before = t;
    const auto res = stepper.try_step(rhs, x, t, dt);
    if (res == ode::fail) {
      if (dt < opt.min_dt) {
        std::ostringstream os;
        os << "step size underflow at t = " << t_before;
        throw IntegrationError(os.str());
      }
      continue;
    }
    record(t, x);
  }
}

}  // namespace detail

/// Integrates y' = a0 + a1 y - a2 y^2 (plus branch) or q` = a0 - a1 q - a2 q^2 (minus).
inline Trajectory integrate_reference(const CoefficientHistory& coeffs, Branch branch, double y0,
                                      double t_end, ReferenceOptions opt = {}) {
  using State = std::array<double, 1>;
  const double s = branch == Branch::plus ? 1.0 : -1.0;
  auto rhs = [&](const State& x, State& dx, double t) {
    const Coeffs c = coeffs(t);
    dx[0] = c.a0 + s * c.a1 * x[0] - c.a2 * x[0] * x[0];
  };
  Trajectory tr;
  State x{y0};
  detail::integrate_controlled(
      rhs, x, 0.0, t_end, opt,
      [&](double t, const State& st) {
        tr.t.push_back(t);
        tr.value.push_back(st[0]);
      },
      [&](const State& st) {
        if (std::abs(st[0]) > opt.blowup_value) {
          tr.blowup = true;
          tr.t_blowup = tr.t.back();
          return true;
        }
        return false;
      });
  return tr;
}

/// Synthetic forward path: beta(t) is prescribed, (mu, h) follow the forward
/// characteristic, and alpha and y are integrated side by side from the alpha
/// equation and the y equation respectively.
struct AlphaPathSample {
  double t, mu, h, alpha, y;
  double y_from_alpha;  // sqrt(c) alpha - I
};

inline std::vector<AlphaPathSample> integrate_alpha_path(const coords::Chart& chart,
                                                         const std::function<double(double)>& beta,
                                                         double mu0, double h0, double alpha0,
                                                         double t_end, ReferenceOptions opt = {}) {
  using State = std::array<double, 4>;  // mu, h, alpha, y
  auto rhs = [&](const State& x, State& dx, double t) {
    const coords::ChartQuantities q = chart.at(x[1], x[0]);
    const RiccatiCoefficients k = coefficients(q);
    const double b = beta(t);
    dx[0] = q.c;
    dx[1] = -q.c * (b + q.g);
    dx[2] = alpha_rhs(q, x[2], b);
    dx[3] = k.a0 + k.a1 * x[3] - k.a2 * x[3] * x[3];
  };
  const coords::ChartQuantities q0 = chart.at(h0, mu0);
  State x{mu0, h0, alpha0, std::sqrt(q0.c) * alpha0 - q0.I};
  std::vector<AlphaPathSample> out;
  detail::integrate_controlled(
      rhs, x, 0.0, t_end, opt,
      [&](double t, const State& st) {
        const coords::ChartQuantities q = chart.at(st[1], st[0]);
        out.push_back({t, st[0], st[1], st[2], st[3], std::sqrt(q.c) * st[2] - q.I});
      },
      [](const State&) { return false; });
  return out;
}

}  // namespace charblow::riccati
