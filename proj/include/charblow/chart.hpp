#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "charblow/errors.hpp"
#include "charblow/pressure.hpp"
#include "charblow/quadrature.hpp"

// The (v, x) <-> (h, mu) change of variables,
//   h(v, x) = \int_v^{v*} c dv,  mu = x,
// chain rules between the two charts, and the integrating factor
//   I(h, mu) = \int_{h0}^{h} (1/2) sqrt(c) (p_mu / c)_h dh.
namespace charblow::coords {

struct ChartPoint {
  double v = 0;
  double xbar = 0;
  double h = 0;
  double mu = 0;
};

/// Chart quantities at one (h, mu) point, all in the (h, mu) chart unless noted.
struct ChartQuantities {
  double v = 0, mu = 0, h = 0, h0 = 0;
  double p = 0, c = 0;
  double c_h = 0, c_mu = 0;
  double p_mu = 0;
  double g = 0;    // p_mu / c
  double g_h = 0;  // (p_mu / c)_h
  double I = 0, I_h = 0, I_mu = 0;
  double h_xbar = 0;  // dh/dx at fixed v
};

/// Second chart derivatives entering the compact-set bounds.
struct SecondOrder {
  double c_hmu = 0, c_mumu = 0, p_mumu = 0;
};

struct ChainResult {
  double f_h = 0;
  double f_mu = 0;
};

/// f_h = -f_v / c,  f_mu = (f_v / c) h_xbar + f_xbar.
constexpr ChainResult chain_rules(double f_v, double f_xbar, double c, double h_xbar) {
  return {-f_v / c, f_v / c * h_xbar + f_xbar};
}

/// Memo of quadrature results keyed on exact argument bits. Internally locked.
class IntegralCache {
 public:
  explicit IntegralCache(std::size_t capacity = 4096) : capacity_(capacity) {}

  std::optional<double> find(int table, double a, double b) const {
    std::lock_guard lock(mu_);
    auto it = map_.find(key(table, a, b));
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void store(int table, double a, double b, double value) {
    std::lock_guard lock(mu_);
    if (capacity_ == 0) return;
    if (map_.size() >= capacity_) map_.clear();
    map_[key(table, a, b)] = value;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return map_.size();
  }
  std::size_t capacity() const { return capacity_; }

 private:
  struct Key {
    int table;
    std::uint64_t a, b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = k.a * 0x9E3779B97F4A7C15ull ^ (k.b + 0x632BE59BD9B4E019ull + (h_ << 6));
      return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(k.table));
    }
    static constexpr std::uint64_t h_ = 0x94D049BB133111EBull;
  };
  static Key key(int table, double a, double b) {
    return {table, std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b)};
  }

  std::size_t capacity_;
  mutable std::mutex mu_;
  std::unordered_map<Key, double, KeyHash> map_;
};

/// Chart interface: closed-form and quadrature implementations share it.
class Chart {
 public:
  virtual ~Chart() = default;
  virtual double h_of_v(double v, double x) const = 0;
  /// Inverse of h_of_v at fixed mu; DomainError if h is outside the image of the validity domain.
  virtual double v_of_h(double h, double mu) const = 0;
  virtual ChartQuantities at(double h, double mu) const = 0;
  virtual SecondOrder second(double h, double mu) const = 0;
  /// p(h, mu) and c(h, mu) only; the solver's inner loop.
  virtual std::pair<double, double> pressure_and_speed(double h, double mu) const = 0;

  const PressureLaw& law() const { return law_; }
  double h0() const { return h0_; }

 protected:
  Chart(PressureLaw law, double h0) : law_(std::move(law)), h0_(h0) {}
  PressureLaw law_;
  double h0_;
};

/// Quadrature route, valid for any law.
///
/// Improper integrals to v* = inf use the law's tail exponent; laws with
/// divergent h integrals must supply a finite v*.
class GenericChart final : public Chart {
 public:
  enum Table { kH = 0, kHx = 1, kI = 2 };

  GenericChart(PressureLaw law, std::optional<double> h0 = std::nullopt,
               std::size_t cache_nodes = 4096, quad::SimpsonOptions opt = {})
      : Chart(std::move(law), 0.0), opt_(opt), cache_(std::make_shared<IntegralCache>(cache_nodes)) {
    if (std::isinf(law_.v_star()) && !(law_.tail_exponent() > 1.0)) {
      throw ModelError(law_.name() +
                       ": h integral to v* = inf needs a tail exponent > 1; set a finite v*");
    }
    h0_ = h0 ? *h0 : h_of_v(1.0, 0.0);
  }

  const IntegralCache& cache() const { return *cache_; }

  /// \int_v^{v*} f(w) dw, improper when v* is infinite.
  template <class F>
  double to_vstar(const F& f, double v) const {
    if (std::isinf(law_.v_star())) return quad::simpson_to_infinity(f, v, law_.tail_exponent(), opt_);
    return quad::simpson(f, v, law_.v_star(), opt_);
  }

  double h_of_v(double v, double x) const override {
    if (auto hit = cache_->find(kH, v, x)) return *hit;
    const double h = to_vstar([&](double w) { return law_.kernel(w, x).c; }, v);
    cache_->store(kH, v, x, h);
    return h;
  }

  /// dh/dx at fixed v.
  double h_xbar(double v, double x) const {
    if (auto hit = cache_->find(kHx, v, x)) return *hit;
    const double hx = to_vstar([&](double w) { return law_.kernel(w, x).c_x; }, v);
    cache_->store(kHx, v, x, hx);
    return hx;
  }

  /// d^2h/dx^2 at fixed v.
  double h_xbarxbar(double v, double x) const {
    return to_vstar(
        [&](double w) {
          const PressureDerivs d = law_.kernel(w, x);
          return -d.p_xxv / (2.0 * d.c) + d.p_xv * d.c_x / (2.0 * d.c * d.c);
        },
        v);
  }

  double v_of_h(double h, double mu) const override {
    const ValidityDomain& dom = law_.domain();
    const double h_lo = h_of_v(dom.v_max, mu);
    const double h_hi = h_of_v(dom.v_min, mu);
    if (!(h >= h_lo && h <= h_hi)) {
      std::ostringstream os;
      os << law_.name() << ": h = " << h << " outside chart image [" << h_lo << ", " << h_hi
         << "] at mu = " << mu;
      throw DomainError(os.str());
    }
    return invert(h, mu, dom.v_min, dom.v_max);
  }

  ChartQuantities at(double h, double mu) const override {
    ChartQuantities q;
    q.h = h;
    q.mu = mu;
    q.h0 = h0_;
    q.v = v_of_h(h, mu);
    const PressureDerivs d = law_.eval(q.v, mu);
    q.p = d.p;
    q.c = d.c;
    q.h_xbar = h_xbar(q.v, mu);
    q.p_mu = d.p_x - d.c * q.h_xbar;
    q.g = q.p_mu / d.c;
    const double gv = g_v(d);
    q.g_h = -gv / d.c;
    q.c_h = -d.c_v / d.c;
    q.c_mu = chain_rules(d.c_v, d.c_x, d.c, q.h_xbar).f_mu;
    q.I_h = -gv / (2.0 * std::sqrt(d.c));
    q.I = integrating_factor(q.v, mu);
    q.I_mu = integrating_factor_mu(q.v, mu, d, q.h_xbar);
    return q;
  }

  SecondOrder second(double h, double mu) const override {
    const double v = v_of_h(h, mu);
    const PressureDerivs d = law_.eval(v, mu);
    const double H = h_xbar(v, mu);
    const double H2 = h_xbarxbar(v, mu);
    const double c = d.c;
    const double c_vv = -d.p_vvv / (2 * c) + d.p_vv * d.c_v / (2 * c * c);
    const double c_vx = -d.p_xvv / (2 * c) + d.p_vv * d.c_x / (2 * c * c);
    const double c_xx = -d.p_xxv / (2 * c) + d.p_xv * d.c_x / (2 * c * c);
    // c_h = k(v, x) = -c_v / c.
    const double k_v = -c_vv / c + d.c_v * d.c_v / (c * c);
    const double k_x = -c_vx / c + d.c_v * d.c_x / (c * c);
    // c_mu(v, x) = c_v H / c + c_x with H_v = -c_x, H_x = H2.
    const double cmu_v = c_vv * H / c - d.c_v * d.c_x / c - d.c_v * H * d.c_v / (c * c) + c_vx;
    const double cmu_x = c_vx * H / c + d.c_v * H2 / c - d.c_v * H * d.c_x / (c * c) + c_xx;
    // p_mu(v, x) = p_x - c H.
    const double pmu_v = d.p_xv - d.c_v * H + c * d.c_x;
    const double pmu_x = d.p_xx - d.c_x * H - c * H2;
    SecondOrder s;
    s.c_hmu = chain_rules(k_v, k_x, c, H).f_mu;
    s.c_mumu = chain_rules(cmu_v, cmu_x, c, H).f_mu;
    s.p_mumu = chain_rules(pmu_v, pmu_x, c, H).f_mu;
    return s;
  }

  std::pair<double, double> pressure_and_speed(double h, double mu) const override {
    const double v = invert(h, mu, law_.domain().v_min, law_.domain().v_max);
    const PressureDerivs d = law_.eval(v, mu);
    return {d.p, d.c};
  }

  /// I(h(v, mu), mu) as a v-integral: \int_{v0}^{v} (1/2) sqrt(c) g_v dw, with h(v0) = h0.
  double integrating_factor(double v, double mu) const {
    if (auto hit = cache_->find(kI, v, mu)) return *hit;
    auto phi = [&](double w) { return phi_of(law_.kernel(w, mu)); };
    double I;
    if (h0_ == 0.0) {
      I = -to_vstar(phi, v);
    } else {
      const double v0 = invert_unbounded(h0_, mu);
      I = quad::simpson(phi, v0, v, opt_);
    }
    cache_->store(kI, v, mu, I);
    return I;
  }

  /// (p_mu / c)_v in the (v, x) chart.
  static double g_v(const PressureDerivs& d) {
    return d.p_xv / (2.0 * d.c) - d.p_x * d.c_v / (d.c * d.c);
  }

 private:
  static double phi_of(const PressureDerivs& d) { return 0.5 * std::sqrt(d.c) * g_v(d); }

  static double phi_x_of(const PressureDerivs& d) {
    const double c = d.c;
    const double c_vx = -d.p_xvv / (2 * c) + d.p_vv * d.c_x / (2 * c * c);
    const double g_vx = d.p_xxv / (2 * c) - d.p_xv * d.c_x / (2 * c * c) - d.p_xx * d.c_v / (c * c) -
                        d.p_x * c_vx / (c * c) + 2.0 * d.p_x * d.c_v * d.c_x / (c * c * c);
    return d.c_x / (4.0 * std::sqrt(c)) * g_v(d) + 0.5 * std::sqrt(c) * g_vx;
  }

  /// Leibniz rule on I = \int_{v0(mu)}^{v(h, mu)} phi(w, mu) dw with v_mu = h_xbar / c.
  double integrating_factor_mu(double v, double mu, const PressureDerivs& d, double H) const {
    auto phix = [&](double w) { return phi_x_of(law_.kernel(w, mu)); };
    double I_mu = phi_of(d) * H / d.c;
    if (h0_ == 0.0) {
      I_mu -= to_vstar(phix, v);
    } else {
      const double v0 = invert_unbounded(h0_, mu);
      const PressureDerivs d0 = law_.kernel(v0, mu);
      I_mu += quad::simpson(phix, v0, v, opt_);
      I_mu -= phi_of(d0) * h_xbar(v0, mu) / d0.c;
    }
    return I_mu;
  }

  /// Safeguarded Newton in log v on h(v) = target over [lo, hi].
  double invert(double target, double mu, double lo, double hi) const {
    double a = std::log(lo);
    double b = std::log(hi);
    double x = std::log(1.0);
    if (x < a || x > b) x = 0.5 * (a + b);
    double fx = h_of_v(std::exp(x), mu) - target;
    for (int it = 0; it < 200; ++it) {
      // h is decreasing in v: fx > 0 means v is too small.
      if (fx > 0) a = x; else b = x;
      const double v = std::exp(x);
      const double dfdx = -law_.kernel(v, mu).c * v;
      double xn = x - fx / dfdx;
      if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
      const double step = std::abs(xn - x);
      x = xn;
      fx = h_of_v(std::exp(x), mu) - target;
      if (step < 1e-15 * (1.0 + std::abs(x)) || fx == 0.0) break;
    }
    return std::exp(x);
  }

  /// Inversion that may leave the validity domain (used for the lower limit v0 of I).
  double invert_unbounded(double target, double mu) const {
    double lo = law_.domain().v_min;
    double hi = law_.domain().v_max;
    for (int i = 0; i < 60 && h_of_v(lo, mu) < target; ++i) lo *= 0.5;
    for (int i = 0; i < 60 && h_of_v(hi, mu) > target; ++i) {
      hi *= 2.0;
      if (!std::isinf(law_.v_star())) hi = std::min(hi, law_.v_star());
    }
    return invert(target, mu, lo, hi);
  }

  quad::SimpsonOptions opt_;
  std::shared_ptr<IntegralCache> cache_;
};

/// Closed forms for p = A(x) v^{-gamma}, v* = inf.
///
///   h = kappa sqrt(A) v^{-(gamma-1)/2},  kappa = 2 sqrt(gamma) / (gamma - 1)
///   p_mu / c = -L h / (2 gamma),  L = A'/A
///   I = -(L / (4 gamma)) [J(h) - J(h0)],  J = sqrt(c) h / ((3 gamma - 1) / (2 (gamma - 1)))
class PowerLawChart final : public Chart {
 public:
  PowerLawChart(PressureLaw law, std::optional<double> h0 = std::nullopt)
      : Chart(std::move(law), 0.0) {
    auto form = law_.power_form();
    if (!form) throw ModelError(law_.name() + ": no power-law closed form");
    form_ = std::move(*form);
    gamma_ = form_.gamma;
    kappa_ = 2.0 * std::sqrt(gamma_) / (gamma_ - 1.0);
    h0_ = h0 ? *h0 : h_of_v(1.0, 0.0);
  }

  double gamma() const { return gamma_; }

  double h_of_v(double v, double x) const override {
    return kappa_ * std::sqrt(form_.coefficient(x).f) * std::pow(v, -0.5 * (gamma_ - 1.0));
  }

  double v_of_h(double h, double mu) const override {
    const double v = v_unchecked(h, mu);
    const ValidityDomain& dom = law_.domain();
    if (!(h > 0.0) || !(v >= dom.v_min && v <= dom.v_max)) {
      std::ostringstream os;
      os << law_.name() << ": h = " << h << " outside chart image at mu = " << mu;
      throw DomainError(os.str());
    }
    return v;
  }

  double v_unchecked(double h, double mu) const {
    return std::pow(h / (kappa_ * std::sqrt(form_.coefficient(mu).f)), -2.0 / (gamma_ - 1.0));
  }

  ChartQuantities at(double h, double mu) const override {
    const ProfileValue a = form_.coefficient(mu);
    const double g = gamma_;
    const double L = a.df / a.f;
    const double dL = a.d2f / a.f - L * L;
    ChartQuantities q;
    q.h = h;
    q.mu = mu;
    q.h0 = h0_;
    q.v = v_of_h(h, mu);
    q.p = a.f * std::pow(q.v, -g);
    q.c = std::sqrt(g * a.f) * std::pow(q.v, -0.5 * (g + 1.0));
    q.c_h = 0.5 * (g + 1.0) / q.v;
    q.c_mu = -L * q.c / (g - 1.0);
    q.h_xbar = 0.5 * L * h;
    q.g = -L * h / (2.0 * g);
    q.p_mu = q.g * q.c;
    q.g_h = -L / (2.0 * g);
    const double J = j_of(q.c, h);
    const double J0 = h0_ > 0.0 ? j_of(speed_unchecked(h0_, a), h0_) : 0.0;
    const double Jmu = -L * J / (2.0 * (g - 1.0));
    const double J0mu = -L * J0 / (2.0 * (g - 1.0));
    q.I = -L / (4.0 * g) * (J - J0);
    q.I_h = -L / (4.0 * g) * std::sqrt(q.c);
    q.I_mu = -dL / (4.0 * g) * (J - J0) - L / (4.0 * g) * (Jmu - J0mu);
    return q;
  }

  SecondOrder second(double h, double mu) const override {
    const ProfileValue a = form_.coefficient(mu);
    const double g = gamma_;
    const double L = a.df / a.f;
    const double dL = a.d2f / a.f - L * L;
    const double v = v_of_h(h, mu);
    const double p = a.f * std::pow(v, -g);
    const double c = std::sqrt(g * a.f) * std::pow(v, -0.5 * (g + 1.0));
    const double e = (g + 1.0) / (g - 1.0);
    SecondOrder s;
    s.c_hmu = -e * L * c / ((g - 1.0) * h);
    s.c_mumu = -(dL * c - L * L * c / (g - 1.0)) / (g - 1.0);
    s.p_mumu = -(dL * p - L * L * p / (g - 1.0)) / (g - 1.0);
    return s;
  }

  std::pair<double, double> pressure_and_speed(double h, double mu) const override {
    const double A = form_.coefficient(mu).f;
    const double v = std::pow(h / (kappa_ * std::sqrt(A)), -2.0 / (gamma_ - 1.0));
    return {A * std::pow(v, -gamma_), std::sqrt(gamma_ * A) * std::pow(v, -0.5 * (gamma_ + 1.0))};
  }

 private:
  double speed_unchecked(double h, const ProfileValue& a) const {
    const double v = std::pow(h / (kappa_ * std::sqrt(a.f)), -2.0 / (gamma_ - 1.0));
    return std::sqrt(gamma_ * a.f) * std::pow(v, -0.5 * (gamma_ + 1.0));
  }
  double j_of(double c, double h) const {
    return std::sqrt(c) * h * 2.0 * (gamma_ - 1.0) / (3.0 * gamma_ - 1.0);
  }

  PowerForm form_;
  double gamma_ = 2.0;
  double kappa_ = 0.0;
};

/// Closed form when the law has one, quadrature otherwise.
inline std::shared_ptr<const Chart> make_chart(const PressureLaw& law,
                                               std::optional<double> h0 = std::nullopt,
                                               std::size_t cache_nodes = 4096) {
  if (law.power_form()) return std::make_shared<PowerLawChart>(law, h0);
  return std::make_shared<GenericChart>(law, h0, cache_nodes);
}

/// Default reference constant h0 = h(v = 1, x = 0).
inline double default_h0(const PressureLaw& law) {
  if (law.power_form()) return PowerLawChart(law, 0.0).h_of_v(1.0, 0.0);
  return GenericChart(law, 0.0, 0).h_of_v(1.0, 0.0);
}

inline double h_of_v(const PressureLaw& law, double v, double x) {
  law.check_domain(v, x);
  return make_chart(law, 0.0, 0)->h_of_v(v, x);
}

inline double v_of_h(const PressureLaw& law, double h, double mu) {
  return make_chart(law, 0.0, 0)->v_of_h(h, mu);
}

inline double I_of(const PressureLaw& law, double h, double mu, double h0) {
  return make_chart(law, h0, 0)->at(h, mu).I;
}

}  // namespace charblow::coords
