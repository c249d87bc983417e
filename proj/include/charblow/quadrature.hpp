#pragma once

#include <algorithm>
#include <cmath>

namespace charblow::quad {

struct SimpsonOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
};

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction. Signed: simpson(f, b, a) == -simpson(f, a, b).
template <class F>
double simpson(const F& f, double a, double b, SimpsonOptions opt = {}) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  // Split once up front so a symmetric integrand cannot pass the first error test by accident.
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  return detail::simpson_step(f, a, m, fa, flm, fm, left, 0.5 * opt.abs_tol, 1, opt.max_depth) +
         detail::simpson_step(f, m, b, fm, frm, fb, right, 0.5 * opt.abs_tol, 1, opt.max_depth);
}

/// \int_lo^\infty f(w) dw for integrands decaying like w^{-q}, q > 1.
///
/// Uses w = lo * s^{-k} with k = 1/(q-1), which maps an exact power tail to a
/// constant integrand on s in (0, 1].
template <class F>
double simpson_to_infinity(const F& f, double lo, double tail_exponent, SimpsonOptions opt = {}) {
  const double k = std::max(1.0, 1.0 / (tail_exponent - 1.0));
  // Keep w finite at the lower end of s; the dropped sliver is below 1e-12 of the integrand scale.
  const double s_min = std::max(1e-12, std::pow(lo * 1e-150, 1.0 / k));
  auto g = [&](double s) {
    const double w = lo * std::pow(s, -k);
    return f(w) * k * lo * std::pow(s, -k - 1.0);
  };
  return simpson(g, s_min, 1.0, opt);
}

}  // namespace charblow::quad
