#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "charblow/chart.hpp"
#include "charblow/errors.hpp"
#include "charblow/gradients.hpp"
#include "charblow/grid.hpp"
#include "charblow/riccati.hpp"

// Smooth-regime solver for
//   h_t + c u_x = 0,  u_t + c h_x + p_mu = 0,
// characteristic tracing, and gradient blowup detection.
namespace charblow::solver {

template <std::size_t N>
using Fields = std::array<std::vector<double>, N>;

/// One-sided difference of f at node i: forward (dir > 0) or backward (dir < 0).
/// Outflow edges use a quadratically extrapolated ghost value.
inline double one_sided(const std::vector<double>& f, std::size_t i, int dir, const Grid& g) {
  const std::size_t n = f.size();
  const double dx = g.dx();
  if (g.bc == Boundary::periodic) {
    return dir > 0 ? (f[(i + 1) % n] - f[i]) / dx : (f[i] - f[(i + n - 1) % n]) / dx;
  }
  if (dir > 0) return i + 1 < n ? (f[i + 1] - f[i]) / dx : (2.0 * f[i] - 3.0 * f[i - 1] + f[i - 2]) / dx;
  return i > 0 ? (f[i] - f[i - 1]) / dx : (-2.0 * f[0] + 3.0 * f[1] - f[2]) / dx;
}

/// MacCormack predictor (forward differences) / corrector (backward differences)
/// for any quasilinear system exposing
///   rates(q, t, dir, out), max_speed(q), validate(q, t).
template <class System>
void maccormack_step(const System& sys, Fields<System::N>& q, double t, double dt) {
  constexpr std::size_t N = System::N;
  const std::size_t n = q[0].size();
  Fields<N> r, qs;
  for (auto& v : r) v.resize(n);
  sys.rates(q, t, +1, r);
  for (std::size_t k = 0; k < N; ++k) {
    qs[k].resize(n);
    for (std::size_t i = 0; i < n; ++i) qs[k][i] = q[k][i] + dt * r[k][i];
  }
  sys.rates(qs, t + dt, -1, r);
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t i = 0; i < n; ++i) q[k][i] = 0.5 * (q[k][i] + qs[k][i] + dt * r[k][i]);
  }
  sys.validate(q, t + dt);
}

/// (h, u) system. The pressure gradient c h_x + p_mu is differenced as the
/// nodal pressure p(h_i, mu_i) so that p = const states stay exactly at rest.
struct EulerSystem {
  static constexpr std::size_t N = 2;
  const coords::Chart* chart;
  Grid grid;

  void rates(const Fields<2>& q, double, int dir, Fields<2>& out) const {
    const std::size_t n = q[0].size();
    std::vector<double> P(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pc = chart->pressure_and_speed(q[0][i], grid.x(i));
      P[i] = pc.first;
      c[i] = pc.second;
    }
    for (std::size_t i = 0; i < n; ++i) {
      out[0][i] = -c[i] * one_sided(q[1], i, dir, grid);
      out[1][i] = -one_sided(P, i, dir, grid);
    }
  }

  double max_speed(const Fields<2>& q) const {
    double m = 0.0;
    for (std::size_t i = 0; i < q[0].size(); ++i) {
      m = std::max(m, chart->pressure_and_speed(q[0][i], grid.x(i)).second);
    }
    return m;
  }

  void validate(const Fields<2>& q, double t) const {
    for (std::size_t i = 0; i < q[0].size(); ++i) {
      if (!std::isfinite(q[0][i]) || !std::isfinite(q[1][i])) {
        std::ostringstream os;
        os << "non-finite value at node " << i << ", t = " << t;
        throw NumericalError(os.str());
      }
      try {
        chart->v_of_h(q[0][i], grid.x(i));
      } catch (const DomainError& e) {
        std::ostringstream os;
        os << "solution left the validity domain at node " << i << ", t = " << t << ": " << e.what();
        throw DomainExitError(os.str(), i, t);
      }
    }
  }
};

/// Single step of the (h, u) system; returns the new state.
inline GridState step(const GridState& s, const coords::Chart& chart, double cfl) {
  if (!(cfl > 0.0 && cfl <= 0.9)) throw GridError("cfl must lie in (0, 0.9]");
  EulerSystem sys{&chart, s.grid};
  Fields<2> q{s.h, s.u};
  const double dt = cfl * s.grid.dx() / sys.max_speed(q);
  maccormack_step(sys, q, s.t, dt);
  return {s.grid, s.t + dt, std::move(q[0]), std::move(q[1])};
}

struct RunOptions {
  double cfl = 0.5;
  double t_max = 1.0;
  double blowup_cut = 1e4;
  /// Stop once a single cell carries this fraction of a field's range.
  double resolution_theta = 0.05;
  /// Extrapolation window for 1/G: samples with G >= fit_window * G_last.
  double fit_window = 0.25;
  bool keep_history = true;
  std::size_t history_stride = 1;
};

struct GradientSample {
  double t = 0;
  double G = 0;     // max(|u_x|, |v_x|)
  double jump = 0;  // largest one-cell jump over the field range
};

enum class StopReason { t_max, blowup_cut, under_resolved };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::t_max:
      return "t_max";
    case StopReason::blowup_cut:
      return "blowup_cut";
    case StopReason::under_resolved:
      return "under_resolved";
  }
  return "t_max";
}

struct RunResult {
  std::vector<GridState> history;
  std::vector<GradientSample> gradients;
  GridState final_state;
  StopReason reason = StopReason::t_max;
  std::size_t steps = 0;
};

namespace detail {

inline double max_jump_fraction(const std::vector<double>& f, const Grid& g) {
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const double range = *hi - *lo;
  const double scale = std::max(std::abs(*hi), std::abs(*lo));
  if (!(range > 1e-12 * std::max(scale, 1.0))) return 0.0;
  double j = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) j = std::max(j, std::abs(f[i + 1] - f[i]));
  if (g.bc == Boundary::periodic) j = std::max(j, std::abs(f.front() - f.back()));
  return j / range;
}

}  // namespace detail

inline GradientSample measure(const GridState& s, const coords::Chart& chart) {
  std::vector<double> v(s.h.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = chart.v_of_h(s.h[i], s.grid.x(i));
  const auto u_x = fd::derivative(s.u, s.grid);
  const auto v_x = fd::derivative(v, s.grid);
  GradientSample g;
  g.t = s.t;
  for (std::size_t i = 0; i < v.size(); ++i) g.G = std::max({g.G, std::abs(u_x[i]), std::abs(v_x[i])});
  g.jump = std::max(detail::max_jump_fraction(s.u, s.grid), detail::max_jump_fraction(v, s.grid));
  return g;
}

/// Integrates to t_max, or until the gradient passes the cut or outruns the grid.
inline RunResult run(const coords::Chart& chart, GridState init, const RunOptions& opt) {
  init.grid.validate();
  if (!(opt.cfl > 0.0 && opt.cfl <= 0.9)) throw GridError("cfl must lie in (0, 0.9]");
  EulerSystem sys{&chart, init.grid};
  Fields<2> q{init.h, init.u};
  sys.validate(q, init.t);
  RunResult res;
  double t = init.t;
  auto snapshot = [&] { return GridState{init.grid, t, q[0], q[1]}; };
  GridState cur = snapshot();
  if (opt.keep_history) res.history.push_back(cur);
  res.gradients.push_back(measure(cur, chart));
  const double t_end = init.t + opt.t_max;
  while (t < t_end) {
    double dt = opt.cfl * init.grid.dx() / sys.max_speed(q);
    bool last = false;
    if (t + dt >= t_end) {
      dt = t_end - t;
      last = true;
    }
    maccormack_step(sys, q, t, dt);
    t = last ? t_end : t + dt;
    ++res.steps;
    cur = snapshot();
    const GradientSample g = measure(cur, chart);
    res.gradients.push_back(g);
    bool stop = false;
    if (g.G > opt.blowup_cut) {
      res.reason = StopReason::blowup_cut;
      stop = true;
    } else if (g.jump > opt.resolution_theta) {
      res.reason = StopReason::under_resolved;
      stop = true;
    }
    if (opt.keep_history && (stop || last || res.steps % opt.history_stride == 0)) {
      res.history.push_back(cur);
    }
    if (stop) break;
  }
  res.final_state = std::move(cur);
  return res;
}

struct BlowupDetection {
  bool found = false;
  double T_obs = std::numeric_limits<double>::quiet_NaN();
  bool extrapolated = false;
};

/// First time max(|u_x|, |v_x|) passes the cut, interpolated linearly in 1/G.
/// With extrapolate set and no crossing, 1/G is fitted linearly over the samples
/// with G >= window * G_last and continued to 1/cut.
inline BlowupDetection detect_blowup(const std::vector<GradientSample>& g, double cut,
                                     bool extrapolate = false, double window = 0.25) {
  BlowupDetection d;
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (!(g[k].t >= g[k - 1].t)) throw GridError("gradient history must have monotone time stamps");
  }
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (g[k].G > cut) {
      const double r0 = 1.0 / g[k - 1].G;
      const double r1 = 1.0 / g[k].G;
      const double f = g[k - 1].G > cut ? 0.0 : (r0 - 1.0 / cut) / (r0 - r1);
      d.found = true;
      d.T_obs = g[k - 1].t + f * (g[k].t - g[k - 1].t);
      return d;
    }
  }
  if (!extrapolate || g.size() < 3) return d;
  const double G_last = g.back().G;
  std::size_t first = g.size();
  while (first > 0 && g[first - 1].G >= window * G_last) --first;
  first = std::min(first, g.size() - 3);
  double st = 0, sr = 0, stt = 0, str = 0;
  const double m = static_cast<double>(g.size() - first);
  for (std::size_t k = first; k < g.size(); ++k) {
    const double r = 1.0 / g[k].G;
    st += g[k].t;
    sr += r;
    stt += g[k].t * g[k].t;
    str += g[k].t * r;
  }
  const double slope = (m * str - st * sr) / (m * stt - st * st);
  const double icpt = (sr - slope * st) / m;
  if (!(slope < 0.0)) return d;
  d.found = true;
  d.extrapolated = true;
  d.T_obs = (1.0 / cut - icpt) / slope;
  return d;
}

// ---------------------------------------------------------------- initial data

enum class Preset { gaussian, sine, tanh_ramp, constant };
enum class Family { forward, backward, velocity, volume };

inline std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::gaussian:
      return "gaussian";
    case Preset::sine:
      return "sine";
    case Preset::tanh_ramp:
      return "tanh_ramp";
    case Preset::constant:
      return "constant";
  }
  return "constant";
}
inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::forward:
      return "forward";
    case Family::backward:
      return "backward";
    case Family::velocity:
      return "velocity";
    case Family::volume:
      return "volume";
  }
  return "forward";
}
inline std::optional<Preset> preset_from(std::string_view s) {
  if (s == "gaussian") return Preset::gaussian;
  if (s == "sine") return Preset::sine;
  if (s == "tanh_ramp") return Preset::tanh_ramp;
  if (s == "constant") return Preset::constant;
  return std::nullopt;
}
inline std::optional<Family> family_from(std::string_view s) {
  if (s == "forward") return Family::forward;
  if (s == "backward") return Family::backward;
  if (s == "velocity") return Family::velocity;
  if (s == "volume") return Family::volume;
  return std::nullopt;
}

/// Perturbation of the stationary state u = 0, p(h, mu) = p*.
///
///   forward   dh = A f, du =  A f
///   backward  dh = A f, du = -A f
///   velocity  du = A f
///   volume    dh = A f
struct InitialSpec {
  Preset preset = Preset::gaussian;
  Family family = Family::forward;
  double amplitude = 0.1;
  std::optional<double> target_y0;
  double center = 0.0;
  double width = 1.0;
  double wavenumber = 1.0;
  std::optional<double> pressure;
};

inline double shape(const InitialSpec& s, const Grid& g, double x) {
  switch (s.preset) {
    case Preset::gaussian: {
      const double z = (x - s.center) / s.width;
      return std::exp(-z * z);
    }
    case Preset::sine:
      return std::sin(2.0 * std::numbers::pi * s.wavenumber * (x - g.x_lo) / g.length());
    case Preset::tanh_ramp:
      return std::tanh((x - s.center) / s.width);
    case Preset::constant:
      return 0.0;
  }
  return 0.0;
}

/// Solves p(v, x) = p* for v; p is decreasing in v.
inline double volume_at_pressure(const PressureLaw& law, double p_star, double x) {
  if (auto form = law.power_form()) {
    return std::pow(form->coefficient(x).f / p_star, 1.0 / form->gamma);
  }
  const ValidityDomain& dom = law.domain();
  auto f = [&](double lv) { return law.eval(std::exp(lv), x).p - p_star; };
  double a = std::log(dom.v_min), b = std::log(dom.v_max);
  if (f(a) < 0.0 || f(b) > 0.0) {
    std::ostringstream os;
    os << "pressure " << p_star << " is not attained at x = " << x;
    throw DomainError(os.str());
  }
  std::uintmax_t it = 200;
  const auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(50), it);
  return std::exp(0.5 * (r.first + r.second));
}

/// Default stationary pressure: p at v = 1 in the middle of the grid.
inline double default_pressure(const PressureLaw& law, const Grid& g) {
  return law.eval(1.0, 0.5 * (g.x_lo + g.x_hi)).p;
}

inline std::vector<double> stationary_h(const coords::Chart& chart, const Grid& g, double p_star) {
  std::vector<double> h(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    h[i] = chart.h_of_v(volume_at_pressure(chart.law(), p_star, x), x);
  }
  return h;
}

inline GridState perturbed_state(const coords::Chart& chart, const Grid& g, const InitialSpec& s,
                                 double amplitude) {
  const double p_star = s.pressure ? *s.pressure : default_pressure(chart.law(), g);
  GridState st;
  st.grid = g;
  st.h = stationary_h(chart, g, p_star);
  st.u.assign(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double f = amplitude * shape(s, g, g.x(i));
    switch (s.family) {
      case Family::forward:
        st.h[i] += f;
        st.u[i] += f;
        break;
      case Family::backward:
        st.h[i] += f;
        st.u[i] -= f;
        break;
      case Family::velocity:
        st.u[i] += f;
        break;
      case Family::volume:
        st.h[i] += f;
        break;
    }
  }
  return st;
}

inline double min_y(const GridState& s, const coords::Chart& chart) {
  const auto f = gradients::compute(s, chart);
  return *std::min_element(f.y.begin(), f.y.end());
}

/// Initial state; with target_y0 set, the amplitude is root-found so min y = target.
inline GridState make_initial(const coords::Chart& chart, const Grid& g, const InitialSpec& s) {
  g.validate();
  if (!s.target_y0) return perturbed_state(chart, g, s, s.amplitude);
  const double target = *s.target_y0;
  auto F = [&](double A) { return min_y(perturbed_state(chart, g, s, A), chart) - target; };
  const double f0 = F(0.0);
  if (f0 <= 0.0) {
    std::ostringstream os;
    os << "target y0 = " << target << " is not below the unperturbed min y = " << f0 + target;
    throw ModelError(os.str());
  }
  double hi = s.amplitude > 0.0 ? s.amplitude : 0.1;
  double lo = 0.0;
  double fhi = F(hi);
  for (int k = 0; fhi > 0.0; ++k) {
    if (k > 60) throw ModelError("could not bracket the amplitude for target y0");
    lo = hi;
    hi *= 2.0;
    fhi = F(hi);
  }
  std::uintmax_t it = 200;
  const auto r = boost::math::tools::toms748_solve(F, lo, hi, F(lo), fhi,
                                                   boost::math::tools::eps_tolerance<double>(45), it);
  return perturbed_state(chart, g, s, 0.5 * (r.first + r.second));
}

// ------------------------------------------------------------ characteristics

enum class CharFamily { forward, backward };

inline std::string_view to_string(CharFamily f) { return f == CharFamily::forward ? "forward" : "backward"; }

struct TraceSample {
  double t = 0, x = 0, h = 0, c = 0;
  double yq = 0;  // y on forward traces, q on backward ones
  double alpha = 0, beta = 0;
  double a0 = 0, a1 = 0, a2 = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();        // y' - (a0 + a1 y - a2 y^2)
  double alpha_residual = std::numeric_limits<double>::quiet_NaN();  // alpha' (or beta`) form
};

struct CharacteristicTrace {
  CharFamily family = CharFamily::forward;
  double x0 = 0;
  int interp_order = 3;
  std::vector<TraceSample> samples;
  bool truncated = false;
  std::string reason;

  double max_residual() const {
    double m = 0.0;
    for (const auto& s : samples) {
      if (std::isfinite(s.residual)) m = std::max(m, std::abs(s.residual));
    }
    return m;
  }
  double max_alpha_residual() const {
    double m = 0.0;
    for (const auto& s : samples) {
      if (std::isfinite(s.alpha_residual)) m = std::max(m, std::abs(s.alpha_residual));
    }
    return m;
  }
};

/// Per-level nodal data shared by every trace over one solution history.
class TraceContext {
 public:
  TraceContext(const std::vector<GridState>& history, const coords::Chart& chart)
      : history_(&history), chart_(&chart) {
    if (history.size() < 3) throw GridError("tracing needs at least 3 stored levels");
    levels_.reserve(history.size());
    for (const auto& s : history) {
      Level L;
      L.t = s.t;
      L.h = s.h;
      L.u_x = fd::derivative(s.u, s.grid);
      L.h_x = fd::derivative(s.h, s.grid);
      L.c.resize(s.h.size());
      for (std::size_t i = 0; i < s.h.size(); ++i) L.c[i] = chart.pressure_and_speed(s.h[i], s.grid.x(i)).second;
      levels_.push_back(std::move(L));
    }
  }

  const Grid& grid() const { return history_->front().grid; }
  const coords::Chart& chart() const { return *chart_; }

  struct Level {
    double t;
    std::vector<double> h, u_x, h_x, c;
  };
  const std::vector<Level>& levels() const { return levels_; }

  std::optional<double> interp(const std::vector<double>& f, double x) const {
    return fd::interp_cubic(f, grid(), x);
  }
  double wrap(double x) const { return fd::wrap(x, grid()); }

 private:
  const std::vector<GridState>* history_;
  const coords::Chart* chart_;
  std::vector<Level> levels_;
};

/// Follows dx/dt = +c (forward) or -c (backward) through the stored levels with
/// RK4 (cubic in space, linear in time for c) and samples y or q and the
/// Riccati coefficients at every level.
inline CharacteristicTrace trace_characteristic(const TraceContext& ctx, double x0, CharFamily fam,
                                                std::optional<double> t_stop = std::nullopt) {
  const auto& L = ctx.levels();
  const double sgn = fam == CharFamily::forward ? 1.0 : -1.0;
  CharacteristicTrace tr;
  tr.family = fam;
  tr.x0 = x0;
  double x = x0;
  auto sample = [&](std::size_t k) -> bool {
    const auto h = ctx.interp(L[k].h, x);
    const auto ux = ctx.interp(L[k].u_x, x);
    const auto hx = ctx.interp(L[k].h_x, x);
    if (!h || !ux || !hx) return false;
    const double xw = ctx.wrap(x);
    const coords::ChartQuantities q = ctx.chart().at(*h, xw);
    const auto ab = gradients::alpha_beta(*ux, *hx, q.p_mu, q.c);
    const auto yq = gradients::y_q(ab.alpha, ab.beta, q.c, q.I);
    const auto k3 = riccati::coefficients(q);
    TraceSample s;
    s.t = L[k].t;
    s.x = xw;
    s.h = *h;
    s.c = q.c;
    s.yq = fam == CharFamily::forward ? yq.y : yq.q;
    s.alpha = ab.alpha;
    s.beta = ab.beta;
    s.a0 = k3.a0;
    s.a1 = k3.a1;
    s.a2 = k3.a2;
    // The alpha-form target is stored in alpha_residual until differences are taken.
    s.alpha_residual = fam == CharFamily::forward ? riccati::alpha_rhs(q, ab.alpha, ab.beta)
                                                  : riccati::beta_rhs(q, ab.alpha, ab.beta);
    tr.samples.push_back(s);
    return true;
  };
  auto speed = [&](std::size_t k, double xx, double theta) -> std::optional<double> {
    const auto c0 = ctx.interp(L[k].c, xx);
    const auto c1 = ctx.interp(L[k + 1].c, xx);
    if (!c0 || !c1) return std::nullopt;
    return sgn * ((1.0 - theta) * *c0 + theta * *c1);
  };
  if (!sample(0)) {
    tr.truncated = true;
    tr.reason = "seed outside the grid";
    return tr;
  }
  for (std::size_t k = 0; k + 1 < L.size(); ++k) {
    if (t_stop && L[k + 1].t > *t_stop) break;
    const double dt = L[k + 1].t - L[k].t;
    const auto k1 = speed(k, x, 0.0);
    const auto k2 = k1 ? speed(k, x + 0.5 * dt * *k1, 0.5) : std::nullopt;
    const auto k3 = k2 ? speed(k, x + 0.5 * dt * *k2, 0.5) : std::nullopt;
    const auto k4 = k3 ? speed(k, x + dt * *k3, 1.0) : std::nullopt;
    if (!k4) {
      tr.truncated = true;
      tr.reason = "path left the grid";
      break;
    }
    x += dt / 6.0 * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if (!sample(k + 1)) {
      tr.truncated = true;
      tr.reason = "path left the grid";
      break;
    }
  }
  // Residuals at interior samples from a three-point difference along the path.
  auto& S = tr.samples;
  std::vector<double> a_target(S.size());
  for (std::size_t k = 0; k < S.size(); ++k) a_target[k] = S[k].alpha_residual;
  const double s1 = fam == CharFamily::forward ? 1.0 : -1.0;
  for (std::size_t k = 0; k < S.size(); ++k) {
    S[k].alpha_residual = std::numeric_limits<double>::quiet_NaN();
    if (k == 0 || k + 1 == S.size()) continue;
    const double dyq = fd::three_point(S[k - 1].t, S[k - 1].yq, S[k].t, S[k].yq, S[k + 1].t, S[k + 1].yq);
    const double y = S[k].yq;
    S[k].residual = dyq - (S[k].a0 + s1 * S[k].a1 * y - S[k].a2 * y * y);
    const auto ab = [&](std::size_t j) { return fam == CharFamily::forward ? S[j].alpha : S[j].beta; };
    const double dab = fd::three_point(S[k - 1].t, ab(k - 1), S[k].t, ab(k), S[k + 1].t, ab(k + 1));
    S[k].alpha_residual = dab - a_target[k];
  }
  return tr;
}

inline CharacteristicTrace trace_characteristic(const std::vector<GridState>& history,
                                                const coords::Chart& chart, double x0, CharFamily fam) {
  return trace_characteristic(TraceContext(history, chart), x0, fam);
}

// --------------------------------------------------------------- blowup report

struct BlowupReport {
  std::size_t n = 0;
  double N = 0, nu = 0.01, h0 = 0;
  double y0_min = 0, q0_min = 0;
  std::optional<double> T_pred, T_obs;
  bool refinement_confirmed = false;
  /// T_obs exists but no refined run has confirmed it.
  bool resolution_limited = false;
  /// T_obs came from extrapolating 1/G after an under-resolved stop.
  bool extrapolated = false;
  riccati::CoefficientBounds bounds;
  CharFamily critical_family = CharFamily::forward;
  double critical_x0 = 0;
  double sup_a2_trace = 0, inf_a2_trace = 0;
  std::string stop_reason;
};

/// Compact set used for the coefficient bounds: the initial h range widened by
/// a quarter of its span on each side, over the whole grid.
struct CompactBox {
  double h_lo = 0, h_hi = 0, mu_lo = 0, mu_hi = 0;
};

inline CompactBox compact_box(const GridState& s) {
  const auto [lo, hi] = std::minmax_element(s.h.begin(), s.h.end());
  const double span = std::max(*hi - *lo, 0.05 * *hi);
  const Grid& g = s.grid;
  return {std::max(*lo - 0.25 * span, 0.5 * *lo), *hi + 0.25 * span, g.x_lo,
          g.bc == Boundary::periodic ? g.x_hi - g.dx() : g.x_hi};
}

inline riccati::CoefficientBounds compact_set_bounds(const coords::Chart& chart, const GridState& s,
                                                     int nh = 32, int nmu = 128) {
  const CompactBox b = compact_box(s);
  return riccati::sample_bounds(chart, b.h_lo, b.h_hi, b.mu_lo, b.mu_hi, nh, nmu);
}

/// Threshold, prediction and observation for one finished run.
inline BlowupReport analyze(const coords::Chart& chart, const RunResult& run, const RunOptions& opt,
                            double nu) {
  BlowupReport rep;
  const GridState& init = run.history.front();
  rep.n = init.grid.n;
  rep.nu = nu;
  rep.h0 = chart.h0();
  rep.stop_reason = std::string(to_string(run.reason));
  const auto f0 = gradients::compute(init, chart);
  const auto iy = std::min_element(f0.y.begin(), f0.y.end()) - f0.y.begin();
  const auto iq = std::min_element(f0.q.begin(), f0.q.end()) - f0.q.begin();
  rep.y0_min = f0.y[static_cast<std::size_t>(iy)];
  rep.q0_min = f0.q[static_cast<std::size_t>(iq)];
  rep.bounds = compact_set_bounds(chart, init);
  rep.N = riccati::threshold_N(rep.bounds, nu);
  const double m0 = std::min(rep.y0_min, rep.q0_min);
  if (m0 < rep.N) rep.T_pred = riccati::lifespan_bound(m0, rep.N, rep.bounds.inf_a2, nu);
  const auto det = detect_blowup(run.gradients, opt.blowup_cut, run.reason == StopReason::under_resolved,
                                   opt.fit_window);
  if (det.found) rep.T_obs = det.T_obs;
  rep.resolution_limited = det.found;
  rep.extrapolated = det.extrapolated;
  rep.critical_family = rep.y0_min <= rep.q0_min ? CharFamily::forward : CharFamily::backward;
  rep.critical_x0 = init.grid.x(static_cast<std::size_t>(rep.critical_family == CharFamily::forward ? iy : iq));
  if (run.history.size() >= 3) {
    const auto tr = trace_characteristic(run.history, chart, rep.critical_x0, rep.critical_family);
    rep.sup_a2_trace = 0.0;
    rep.inf_a2_trace = std::numeric_limits<double>::infinity();
    for (const auto& s : tr.samples) {
      rep.sup_a2_trace = std::max(rep.sup_a2_trace, s.a2);
      rep.inf_a2_trace = std::min(rep.inf_a2_trace, s.a2);
    }
  }
  return rep;
}

/// Marks the coarse report confirmed when a refined T_obs moves it by less than 5%.
inline void confirm_refinement(BlowupReport& coarse, const BlowupReport& fine) {
  if (coarse.T_obs && fine.T_obs) {
    coarse.refinement_confirmed = std::abs(*fine.T_obs - *coarse.T_obs) < 0.05 * std::abs(*fine.T_obs);
    coarse.resolution_limited = !coarse.refinement_confirmed;
  }
}

}  // namespace charblow::solver
