#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charblow/errors.hpp"
#include "charblow/profile.hpp"
#include "charblow/spline.hpp"

namespace charblow {

/// Partials of p(v, x) up to third order (p_xxx is never needed), plus the wavespeed.
///
/// x here is the material coordinate with v held fixed (x-bar in the chart notation).
struct PressureDerivs {
  double p = 0, p_v = 0, p_vv = 0, p_vvv = 0;
  double p_x = 0, p_xv = 0, p_xvv = 0, p_xx = 0, p_xxv = 0;
  // Filled from the above: c = sqrt(-p_v), c_v = -p_vv / (2c), c_x = -p_xv / (2c).
  double c = 0, c_v = 0, c_x = 0;
};

struct ValidityDomain {
  double v_min = 1e-6;
  double v_max = 1e6;
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();

  bool contains(double v, double x) const {
    return v >= v_min && v <= v_max && x >= x_min && x <= x_max;
  }
};

/// p = A(x) v^{-gamma}. Every built-in analytic model has this shape.
struct PowerForm {
  double gamma = 2.0;
  std::function<ProfileValue(double)> coefficient;
};

/// Raw model: returns the p-partials; the wrapper fills c, c_v, c_x.
class LawModel {
 public:
  virtual ~LawModel() = default;
  virtual PressureDerivs partials(double v, double x) const = 0;
  virtual std::optional<PowerForm> power_form() const { return std::nullopt; }
};

/// A pressure law p(v, x) with metadata and an explicit validity domain.
///
/// Evaluation is pure; a PressureLaw may be shared read-only across threads.
class PressureLaw {
 public:
  PressureLaw() = default;
  PressureLaw(std::shared_ptr<const LawModel> model, std::string name,
              std::map<std::string, double> params, ValidityDomain domain,
              double v_star = std::numeric_limits<double>::infinity(),
              double tail_exponent = std::numeric_limits<double>::quiet_NaN())
      : model_(std::move(model)),
        name_(std::move(name)),
        params_(std::move(params)),
        domain_(domain),
        v_star_(v_star),
        tail_exponent_(tail_exponent) {}

  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }
  const ValidityDomain& domain() const { return domain_; }
  ValidityDomain& domain() { return domain_; }
  /// Upper limit of the h integral; +inf for power laws with gamma > 1.
  double v_star() const { return v_star_; }
  /// c ~ v^{-q} as v -> inf; only meaningful when v_star is infinite.
  double tail_exponent() const { return tail_exponent_; }
  std::optional<PowerForm> power_form() const { return model_->power_form(); }
  bool valid() const { return static_cast<bool>(model_); }

  /// Partials without any domain or sign check. Used inside quadratures that
  /// legitimately run past the validity domain (e.g. up to v* = inf).
  PressureDerivs kernel(double v, double x) const {
    PressureDerivs d = model_->partials(v, x);
    d.c = std::sqrt(-d.p_v);
    d.c_v = -d.p_vv / (2.0 * d.c);
    d.c_x = -d.p_xv / (2.0 * d.c);
    return d;
  }

  /// Checked evaluation.
  PressureDerivs eval(double v, double x) const {
    check_domain(v, x);
    PressureDerivs d = model_->partials(v, x);
    if (!(d.p_v < 0.0)) {
      std::ostringstream os;
      os << name_ << ": p_v = " << d.p_v << " >= 0 at (v=" << v << ", x=" << x << ")";
      throw HyperbolicityError(os.str());
    }
    d.c = std::sqrt(-d.p_v);
    d.c_v = -d.p_vv / (2.0 * d.c);
    d.c_x = -d.p_xv / (2.0 * d.c);
    return d;
  }

  void check_domain(double v, double x) const {
    auto fail = [&](const char* bound, double lim) {
      std::ostringstream os;
      os << name_ << ": (v=" << v << ", x=" << x << ") violates " << bound << " = " << lim;
      throw DomainError(os.str());
    };
    if (!(v > 0.0)) fail("v > 0", 0.0);
    if (!(v >= domain_.v_min)) fail("v_min", domain_.v_min);
    if (!(v <= domain_.v_max)) fail("v_max", domain_.v_max);
    if (!(x >= domain_.x_min)) fail("x_min", domain_.x_min);
    if (!(x <= domain_.x_max)) fail("x_max", domain_.x_max);
  }

 private:
  std::shared_ptr<const LawModel> model_;
  std::string name_;
  std::map<std::string, double> params_;
  ValidityDomain domain_;
  double v_star_ = std::numeric_limits<double>::infinity();
  double tail_exponent_ = std::numeric_limits<double>::quiet_NaN();
};

namespace models {

/// p = A(x) v^{-gamma}, all partials in closed form.
class PowerLawModel final : public LawModel {
 public:
  PowerLawModel(double gamma, std::function<ProfileValue(double)> coefficient)
      : gamma_(gamma), coefficient_(std::move(coefficient)) {}

  PressureDerivs partials(double v, double x) const override {
    const ProfileValue a = coefficient_(x);
    const double g = gamma_;
    const double w = std::pow(v, -g);
    const double w1 = -g * w / v;
    const double w2 = g * (g + 1.0) * w / (v * v);
    const double w3 = -g * (g + 1.0) * (g + 2.0) * w / (v * v * v);
    PressureDerivs d;
    d.p = a.f * w;
    d.p_v = a.f * w1;
    d.p_vv = a.f * w2;
    d.p_vvv = a.f * w3;
    d.p_x = a.df * w;
    d.p_xv = a.df * w1;
    d.p_xvv = a.df * w2;
    d.p_xx = a.d2f * w;
    d.p_xxv = a.d2f * w1;
    return d;
  }

  std::optional<PowerForm> power_form() const override { return PowerForm{gamma_, coefficient_}; }

 private:
  double gamma_;
  std::function<ProfileValue(double)> coefficient_;
};

/// Arbitrary kernel supplied as a callable. No closed-form chart.
class FunctionModel final : public LawModel {
 public:
  explicit FunctionModel(std::function<PressureDerivs(double, double)> f) : f_(std::move(f)) {}
  PressureDerivs partials(double v, double x) const override { return f_(v, x); }

 private:
  std::function<PressureDerivs(double, double)> f_;
};

/// Tensor-product natural cubic spline through tabulated p(v_i, x_j).
class TabulatedModel final : public LawModel {
 public:
  TabulatedModel(std::vector<double> v, std::vector<double> x, std::vector<double> p_row_major)
      : surface_(std::move(v), std::move(x), std::move(p_row_major)) {}

  PressureDerivs partials(double v, double x) const override {
    const auto s = surface_.eval(v, x);
    PressureDerivs d;
    d.p = s.f00;
    d.p_v = s.f10;
    d.p_vv = s.f20;
    d.p_vvv = s.f30;
    d.p_x = s.f01;
    d.p_xv = s.f11;
    d.p_xvv = s.f21;
    d.p_xx = s.f02;
    d.p_xxv = s.f12;
    return d;
  }

  const SplineSurface& surface() const { return surface_; }

 private:
  SplineSurface surface_;
};

}  // namespace models

namespace laws {

inline void require_gamma(double gamma) {
  if (!(gamma > 1.0)) throw ModelError("gamma must exceed 1, got " + std::to_string(gamma));
}

/// p = K v^{-gamma}.
inline PressureLaw isentropic(double gamma, double K) {
  require_gamma(gamma);
  if (!(K > 0.0)) throw ModelError("K must be positive");
  auto coef = [K](double) { return ProfileValue{K, 0.0, 0.0}; };
  return {std::make_shared<models::PowerLawModel>(gamma, coef), "isentropic",
          {{"gamma", gamma}, {"K", K}}, ValidityDomain{}, std::numeric_limits<double>::infinity(),
          0.5 * (gamma + 1.0)};
}

/// p = K e^{S(x)/cv} v^{-gamma}.
inline PressureLaw gamma_entropy(double gamma, double K, double cv, Profile entropy) {
  require_gamma(gamma);
  if (!(K > 0.0) || !(cv > 0.0)) throw ModelError("K and cv must be positive");
  auto coef = [K, cv, entropy](double x) {
    const ProfileValue s = entropy(x);
    const double a = K * std::exp(s.f / cv);
    const double ds = s.df / cv;
    return ProfileValue{a, a * ds, a * (s.d2f / cv + ds * ds)};
  };
  return {std::make_shared<models::PowerLawModel>(gamma, coef), "gamma_entropy",
          {{"gamma", gamma}, {"K", K}, {"cv", cv}}, ValidityDomain{},
          std::numeric_limits<double>::infinity(), 0.5 * (gamma + 1.0)};
}

/// Transverse MHD with gamma = 2: p = B(x) v^{-2}, B = A1 + A2.
///
/// B is sampled on [x_lo, x_hi] (and minimised exactly for the presets); any
/// non-positive value is a ModelError.
inline PressureLaw mhd(const Profile& B, double x_lo, double x_hi) {
  const double bmin = B.min_on(x_lo, x_hi);
  double sampled = bmin;
  constexpr int kSamples = 1001;
  for (int i = 0; i < kSamples; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (kSamples - 1);
    sampled = std::min(sampled, B(x).f);
  }
  if (!(sampled > 0.0)) {
    throw ModelError("MHD coefficient B must be positive; min B = " + std::to_string(sampled));
  }
  auto coef = [B](double x) { return B(x); };
  ValidityDomain dom;
  dom.x_min = x_lo;
  dom.x_max = x_hi;
  return {std::make_shared<models::PowerLawModel>(2.0, coef), "mhd", {{"gamma", 2.0}},
          dom, std::numeric_limits<double>::infinity(), 1.5};
}

/// Tabulated p on a rectangular grid. v* is the largest tabulated v.
inline PressureLaw tabulated(std::vector<double> v, std::vector<double> x, std::vector<double> p) {
  if (v.size() < 4) throw ModelError("tabulated law needs at least 4 v nodes");
  if (x.empty()) throw ModelError("tabulated law needs at least one x node");
  ValidityDomain dom{v.front(), v.back(), x.front(), x.back()};
  if (x.size() == 1) {
    dom.x_min = -std::numeric_limits<double>::infinity();
    dom.x_max = std::numeric_limits<double>::infinity();
  }
  const double vstar = v.back();
  auto model = std::make_shared<models::TabulatedModel>(std::move(v), std::move(x), std::move(p));
  return {model, "tabulated", {}, dom, vstar};
}

/// Wrap a user kernel. v_star must be finite unless tail_exponent > 1 is given.
inline PressureLaw custom(std::function<PressureDerivs(double, double)> kernel, std::string name,
                          ValidityDomain dom, double v_star, double tail_exponent = std::nan("")) {
  return {std::make_shared<models::FunctionModel>(std::move(kernel)), std::move(name), {}, dom,
          v_star, tail_exponent};
}

}  // namespace laws

/// Builds the MHD law from its coefficient profile on the given material interval.
inline PressureLaw make_mhd_law(const Profile& B, double x_lo, double x_hi) {
  return laws::mhd(B, x_lo, x_hi);
}

/// Derivative record at one point (checked).
inline PressureDerivs eval(const PressureLaw& law, double v, double x) { return law.eval(v, x); }

}  // namespace charblow
