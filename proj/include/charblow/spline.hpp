#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "charblow/errors.hpp"

namespace charblow {

/// Value and first three derivatives of a cubic spline.
struct SplineValue {
  double f = 0, d1 = 0, d2 = 0, d3 = 0;
};

/// Not-a-knot cubic spline. Extrapolates with the end cubic outside the knots.
///
/// Not-a-knot rather than natural end conditions: a natural spline pins the
/// second derivative to zero at the table ends, which would break p_vv > 0.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) throw ModelError("spline: knot/value size mismatch");
    if (x_.size() < 4) throw ModelError("spline: need at least 4 knots");
    for (std::size_t i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1])) throw ModelError("spline: knots must be strictly increasing");
    }
    m_ = second_derivatives(x_, y_);
  }

  SplineValue operator()(double x) const { return eval(x_, y_, m_, x); }

  /// Second derivatives at the knots for data y on knots x (not-a-knot ends).
  static std::vector<double> second_derivatives(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      d[i] = (y[i + 1] - y[i]) / h[i];
    }
    // Unknowns M_1 .. M_{n-2}; M_0 and M_{n-1} eliminated with the not-a-knot relations
    //   M_0 = (1 + h0/h1) M_1 - (h0/h1) M_2, and the mirror at the right end.
    const std::size_t k = n - 2;
    std::vector<double> lo(k, 0.0), di(k, 0.0), up(k, 0.0), rhs(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = j + 1;
      lo[j] = h[i - 1];
      di[j] = 2.0 * (h[i - 1] + h[i]);
      up[j] = h[i];
      rhs[j] = 6.0 * (d[i] - d[i - 1]);
    }
    {
      const double r = h[0] / h[1];
      di[0] += lo[0] * (1.0 + r);
      if (k > 1) up[0] -= lo[0] * r;
      lo[0] = 0.0;
    }
    {
      const double r = h[n - 2] / h[n - 3];
      di[k - 1] += up[k - 1] * (1.0 + r);
      if (k > 1) lo[k - 1] -= up[k - 1] * r;
      up[k - 1] = 0.0;
    }
    // Thomas algorithm.
    for (std::size_t j = 1; j < k; ++j) {
      const double w = lo[j] / di[j - 1];
      di[j] -= w * up[j - 1];
      rhs[j] -= w * rhs[j - 1];
    }
    std::vector<double> m(n, 0.0);
    m[k] = rhs[k - 1] / di[k - 1];
    for (std::size_t j = k - 1; j-- > 0;) {
      m[j + 1] = (rhs[j] - up[j] * m[j + 2]) / di[j];
    }
    const double r0 = h[0] / h[1];
    m[0] = (1.0 + r0) * m[1] - r0 * m[2];
    const double rn = h[n - 2] / h[n - 3];
    m[n - 1] = (1.0 + rn) * m[n - 2] - rn * m[n - 3];
    return m;
  }

  static SplineValue eval(std::span<const double> x, std::span<const double> y,
                          std::span<const double> m, double t) {
    const std::size_t n = x.size();
    std::size_t k = 0;
    if (t >= x[n - 1]) {
      k = n - 2;
    } else if (t > x[0]) {
      k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
    }
    const double h = x[k + 1] - x[k];
    const double a = x[k + 1] - t;
    const double b = t - x[k];
    const double ca = y[k] / h - m[k] * h / 6.0;
    const double cb = y[k + 1] / h - m[k + 1] * h / 6.0;
    SplineValue s;
    s.f = m[k] * a * a * a / (6.0 * h) + m[k + 1] * b * b * b / (6.0 * h) + ca * a + cb * b;
    s.d1 = -m[k] * a * a / (2.0 * h) + m[k + 1] * b * b / (2.0 * h) - ca + cb;
    s.d2 = m[k] * a / h + m[k + 1] * b / h;
    s.d3 = (m[k + 1] - m[k]) / h;
    return s;
  }

 private:
  std::vector<double> x_, y_, m_;
};

/// Mixed partials f_{ij} = d^i/du^i d^j/dw^j of a tensor-product spline surface.
struct SurfaceValue {
  double f00 = 0, f10 = 0, f20 = 0, f30 = 0;
  double f01 = 0, f11 = 0, f21 = 0;
  double f02 = 0, f12 = 0;
};

/// Tensor-product not-a-knot spline over a (u, w) grid, data row-major in u:
/// value(u_i, w_j) = data[j * nu + i]. A single w column means no w-dependence.
class SplineSurface {
 public:
  SplineSurface(std::vector<double> u, std::vector<double> w, std::vector<double> data)
      : u_(std::move(u)), w_(std::move(w)) {
    const std::size_t nu = u_.size();
    const std::size_t nw = w_.size();
    if (data.size() != nu * nw) throw ModelError("spline surface: data size must be nu * nw");
    if (nw != 1 && nw < 4) throw ModelError("spline surface: need 1 or at least 4 w nodes");
    for (std::size_t j = 0; j < nw; ++j) {
      std::vector<double> row(data.begin() + static_cast<std::ptrdiff_t>(j * nu),
                              data.begin() + static_cast<std::ptrdiff_t>((j + 1) * nu));
      rows_.emplace_back(u_, std::move(row));
    }
  }

  SurfaceValue eval(double u, double w) const {
    const std::size_t nw = w_.size();
    SurfaceValue out;
    if (nw == 1) {
      const SplineValue s = rows_[0](u);
      out.f00 = s.f;
      out.f10 = s.d1;
      out.f20 = s.d2;
      out.f30 = s.d3;
      return out;
    }
    std::array<std::vector<double>, 4> by_order;
    for (auto& v : by_order) v.resize(nw);
    for (std::size_t j = 0; j < nw; ++j) {
      const SplineValue s = rows_[j](u);
      by_order[0][j] = s.f;
      by_order[1][j] = s.d1;
      by_order[2][j] = s.d2;
      by_order[3][j] = s.d3;
    }
    auto across = [&](const std::vector<double>& vals) {
      const auto m = CubicSpline::second_derivatives(w_, vals);
      return CubicSpline::eval(w_, vals, m, w);
    };
    const SplineValue s0 = across(by_order[0]);
    const SplineValue s1 = across(by_order[1]);
    const SplineValue s2 = across(by_order[2]);
    const SplineValue s3 = across(by_order[3]);
    out.f00 = s0.f;
    out.f01 = s0.d1;
    out.f02 = s0.d2;
    out.f10 = s1.f;
    out.f11 = s1.d1;
    out.f12 = s1.d2;
    out.f20 = s2.f;
    out.f21 = s2.d1;
    out.f30 = s3.f;
    return out;
  }

 private:
  std::vector<double> u_, w_;
  std::vector<CubicSpline> rows_;
};

}  // namespace charblow
