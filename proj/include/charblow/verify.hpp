#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charblow/chart.hpp"
#include "charblow/duct.hpp"
#include "charblow/gradients.hpp"
#include "charblow/mhd.hpp"
#include "charblow/pressure.hpp"
#include "charblow/riccati.hpp"

namespace charblow::verify {

struct QuantityRange {
  std::string name;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  void add(double x) {
    min = std::min(min, x);
    max = std::max(max, x);
  }
};

/// Ranges of the chart quantities over a sample set. Two lists are kept: the
/// bounded quantities of the coefficient assumption, and the finite quantities
/// used by the threshold proof (p_h = c, so p_muh = c_mu, p_muhh = c_hmu,
/// p_mumuh = c_mumu).
struct ValidationReport {
  std::string law;
  std::size_t samples = 0;
  std::vector<QuantityRange> assumption;
  std::vector<QuantityRange> proof;

  const QuantityRange* find(const std::string& name) const {
    for (const auto* list : {&assumption, &proof}) {
      for (const auto& q : *list) {
        if (q.name == name) return &q;
      }
    }
    return nullptr;
  }
};

/// Throws HyperbolicityError (p_v >= 0 or p_vv <= 0) naming the first offending point.
inline ValidationReport validate_law(const PressureLaw& law, const std::vector<std::pair<double, double>>& pts,
                                     std::optional<double> h0 = std::nullopt) {
  if (pts.empty()) throw GridError("validate_law needs at least one sample point");
  ValidationReport r;
  r.law = law.name();
  r.samples = pts.size();
  for (const auto& [v, x] : pts) {
    const PressureDerivs d = law.eval(v, x);
    if (!(d.p_vv > 0.0)) {
      std::ostringstream os;
      os << law.name() << ": p_vv = " << d.p_vv << " <= 0 at (v=" << v << ", x=" << x << ")";
      throw HyperbolicityError(os.str());
    }
  }
  const auto chart = coords::make_chart(law, h0);
  const char* a_names[] = {"|h|", "c", "c_h", "|c_mu|", "|c_mumu|", "|c_hmu|", "|p_mu|", "|p_mumu|"};
  const char* p_names[] = {"h", "c", "c_h", "p_mu", "p_muh", "p_muhh", "p_mumuh"};
  for (const char* n : a_names) r.assumption.push_back({n});
  for (const char* n : p_names) r.proof.push_back({n});
  for (const auto& [v, x] : pts) {
    const double h = chart->h_of_v(v, x);
    const coords::ChartQuantities q = chart->at(h, x);
    const coords::SecondOrder s = chart->second(h, x);
    if (!(q.c_h > 0.0)) {
      std::ostringstream os;
      os << law.name() << ": c_h = " << q.c_h << " <= 0 at (v=" << v << ", x=" << x << ")";
      throw HyperbolicityError(os.str());
    }
    const double a[] = {std::abs(h), q.c, q.c_h, std::abs(q.c_mu), std::abs(s.c_mumu),
                        std::abs(s.c_hmu), std::abs(q.p_mu), std::abs(s.p_mumu)};
    const double p[] = {h, q.c, q.c_h, q.p_mu, q.c_mu, s.c_hmu, s.c_mumu};
    for (std::size_t i = 0; i < r.assumption.size(); ++i) r.assumption[i].add(a[i]);
    for (std::size_t i = 0; i < r.proof.size(); ++i) r.proof[i].add(p[i]);
  }
  return r;
}

/// Uniform random (v, x) points in [v_lo, v_hi] x [x_lo, x_hi].
inline std::vector<std::pair<double, double>> random_points(std::size_t count, double v_lo, double v_hi,
                                                            double x_lo, double x_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dv(v_lo, v_hi), dx(x_lo, x_hi);
  std::vector<std::pair<double, double>> pts(count);
  for (auto& p : pts) {
    p.first = dv(rng);
    p.second = dx(rng);
  }
  return pts;
}

struct CheckResult {
  std::string name;
  double max_error = 0;
  double tolerance = 0;
  bool applicable = true;
  bool passed = true;
  std::string detail;
};

/// c (p_mu/c)_h against c_mu - c_h p_mu / c.
inline CheckResult check_c_pmu(const coords::Chart& chart, const std::vector<std::pair<double, double>>& pts) {
  CheckResult r{"c_pmu_identity", 0.0, 1e-8};
  for (const auto& [v, x] : pts) {
    const auto q = chart.at(chart.h_of_v(v, x), x);
    const double lhs = q.c * q.g_h;
    const double rhs = q.c_mu - q.c_h * q.p_mu / q.c;
    r.max_error = std::max(r.max_error, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  r.passed = r.max_error <= r.tolerance;
  return r;
}

/// c (p_mu/c)_h in the (h, mu) chart against (c/2) (p_xbar/p_v)_v in the (v, xbar) chart.
inline CheckResult check_rc_function(const coords::Chart& chart,
                                     const std::vector<std::pair<double, double>>& pts) {
  CheckResult r{"rc_function_identity", 0.0, 1e-8};
  for (const auto& [v, x] : pts) {
    const auto q = chart.at(chart.h_of_v(v, x), x);
    const PressureDerivs d = chart.law().eval(v, x);
    const double ratio_v = d.p_xv / d.p_v - d.p_x * d.p_vv / (d.p_v * d.p_v);
    const double lhs = q.c * q.g_h;
    const double rhs = 0.5 * d.c * ratio_v;
    r.max_error = std::max(r.max_error, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  r.passed = r.max_error <= r.tolerance;
  return r;
}

/// (p_xbar/p_v)_v = (2/c) c_x along p_x = 0.
inline CheckResult check_rc_equi(const PressureLaw& law, const std::vector<std::pair<double, double>>& pts) {
  CheckResult r{"rc_equi_identity", 0.0, 1e-8};
  for (const auto& [v, x] : pts) {
    r.max_error = std::max(r.max_error, gradients::rc_consistency_check(law, v, x).diff);
  }
  r.passed = r.max_error <= r.tolerance;
  return r;
}

/// x-independent law: a0 = a1 = I = 0.
inline CheckResult check_psystem(const coords::Chart& chart, const std::vector<std::pair<double, double>>& pts) {
  CheckResult r{"psystem_degeneration", 0.0, 1e-12};
  for (const auto& [v, x] : pts) {
    if (chart.law().eval(v, x).p_x != 0.0) {
      r.applicable = false;
      r.detail = "law depends on x";
      return r;
    }
  }
  for (const auto& [v, x] : pts) {
    const auto q = chart.at(chart.h_of_v(v, x), x);
    const auto k = riccati::coefficients(q);
    r.max_error = std::max({r.max_error, std::abs(k.a0), std::abs(k.a1), std::abs(q.I)});
  }
  r.passed = r.max_error <= r.tolerance;
  return r;
}

/// Relative error of the quadrature chart against the MHD closed forms.
///
/// Each quantity's error is scaled by max(|closed form|, 1e-3 * its largest
/// magnitude over the sample), so zero crossings of I, a0 and a1 stay meaningful.
/// The quadrature runs at abs_tol 1e-13 here; near those crossings the default
/// tolerance leaves relative errors around 1e-6.
inline CheckResult check_mhd_closed_form(const PressureLaw& law, const Profile& B,
                                         const std::vector<std::pair<double, double>>& pts,
                                         double quad_tol = 1e-13) {
  CheckResult r{"mhd_closed_form", 0.0, 1e-7};
  if (law.name() != "mhd") {
    r.applicable = false;
    r.detail = "not an mhd law";
    return r;
  }
  quad::SimpsonOptions so;
  so.abs_tol = quad_tol;
  const coords::GenericChart chart(law, 0.0, 4096, so);
  struct Pair {
    std::vector<double> gen, cf;
  };
  Pair h, I, a0, a1, a2;
  for (const auto& [v, x] : pts) {
    const ProfileValue b = B(x);
    const double hc = mhd::h_of_v(v, b.f);
    const auto cf = mhd::closed_form(hc, b);
    const auto q = chart.at(hc, x);
    const auto k = riccati::coefficients(q);
    h.gen.push_back(chart.h_of_v(v, x));
    h.cf.push_back(hc);
    I.gen.push_back(q.I);
    I.cf.push_back(cf.I);
    a0.gen.push_back(k.a0);
    a0.cf.push_back(cf.a0);
    a1.gen.push_back(k.a1);
    a1.cf.push_back(cf.a1);
    a2.gen.push_back(k.a2);
    a2.cf.push_back(cf.a2);
  }
  std::ostringstream os;
  const std::pair<const char*, const Pair*> parts[] = {{"h", &h}, {"I", &I}, {"a0", &a0}, {"a1", &a1}, {"a2", &a2}};
  for (const auto& [name, p] : parts) {
    double scale = 0.0;
    for (double c : p->cf) scale = std::max(scale, std::abs(c));
    double e = 0.0;
    for (std::size_t i = 0; i < p->cf.size(); ++i) {
      e = std::max(e, std::abs(p->gen[i] - p->cf[i]) / std::max({std::abs(p->cf[i]), 1e-3 * scale, 1e-300}));
    }
    os << name << '=' << e << ' ';
    r.max_error = std::max(r.max_error, e);
  }
  r.detail = os.str();
  r.passed = r.max_error <= r.tolerance;
  return r;
}

/// Convergence order of log2(e_coarse / e_fine).
inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

/// Duct metric identities on a smooth run at n and 2n: order >= 1.8, or both
/// residuals already at rounding level.
inline CheckResult check_duct_metric(const duct::Gas& gas, const Profile& area, std::size_t n = 100) {
  CheckResult r{"duct_metric_identities", 0.0, 1.8};
  duct::DuctInitial in;
  in.u_amp = 0.1;
  in.X_lo = -6.0;
  in.entropy = Profile::sinusoidal(0.0, 0.2, 0.5);
  auto resid = [&](std::size_t k) {
    Grid g{k, -6.0, 6.0, Boundary::outflow};
    return duct::metric_identities_residual(duct::run_duct(gas, area, g, in, 0.5));
  };
  const auto c = resid(n);
  const auto f = resid(2 * n);
  double worst = std::numeric_limits<double>::infinity();
  std::ostringstream os;
  const std::pair<const char*, std::pair<double, double>> parts[] = {
      {"a_t", {c.a_t, f.a_t}}, {"a_x", {c.a_x, f.a_x}}, {"adot_t", {c.adot_t, f.adot_t}}, {"adot_x", {c.adot_x, f.adot_x}}};
  for (const auto& [name, e] : parts) {
    if (e.first <= 1e-12 && e.second <= 1e-12) {
      os << name << "=exact ";
      continue;
    }
    const double o = order(e.first, e.second);
    os << name << "_order=" << o << ' ';
    worst = std::min(worst, o);
  }
  r.max_error = f.max();
  r.detail = os.str();
  r.passed = !(worst < r.tolerance);
  return r;
}

}  // namespace charblow::verify
