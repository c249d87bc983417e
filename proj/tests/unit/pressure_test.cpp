#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "charblow/pressure.hpp"
#include "charblow/verify.hpp"

using namespace charblow;

TEST(Pressure, IsentropicAtUnitVolume) {
  const auto d = laws::isentropic(2.0, 1.0).eval(1.0, 0.0);
  EXPECT_DOUBLE_EQ(d.p, 1.0);
  EXPECT_DOUBLE_EQ(d.p_v, -2.0);
  EXPECT_NEAR(d.c, std::sqrt(2.0), 1e-15);
}

TEST(Pressure, MhdSpeedAndValues) {
  const auto one = laws::mhd(Profile::constant(1.0), 0.0, 1.0);
  EXPECT_NEAR(one.eval(1.0, 0.5).c, std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(one.eval(2.0, 0.5).p, 0.25);
  EXPECT_EQ(one.eval(1.3, 0.2).p_x, 0.0);

  const auto lin = laws::mhd(Profile::linear(1.0, 1.0), 0.0, 2.0);
  const auto d = lin.eval(1.0, 1.0);
  EXPECT_DOUBLE_EQ(d.p, 2.0);
  EXPECT_DOUBLE_EQ(d.p_x, 1.0);
}

TEST(Pressure, MhdRejectsNonPositiveB) {
  EXPECT_THROW(laws::mhd(Profile::sinusoidal(0.05, 0.1), 0.0, 6.3), ModelError);
}

TEST(Pressure, DerivativesMatchCentralDifferences) {
  const std::vector<PressureLaw> all = {
      laws::isentropic(1.4, 1.0),
      laws::gamma_entropy(1.4, 1.0, 1.0, Profile::sinusoidal(0.0, 0.1)),
      laws::mhd(Profile::sinusoidal(1.0, 0.1), 0.0, 6.3),
  };
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dv(0.5, 2.0), dx(0.5, 5.5);
  constexpr double d = 1e-5;
  for (const auto& law : all) {
    for (int k = 0; k < 1000; ++k) {
      const double v = dv(rng), x = dx(rng);
      const auto c = law.eval(v, x);
      const double fd = (law.eval(v + d, x).p - law.eval(v - d, x).p) / (2 * d);
      EXPECT_NEAR(c.p_v, fd, 1e-8 * (1.0 + std::abs(c.p_v))) << law.name();
      const double fdv = (law.eval(v + d, x).p_v - law.eval(v - d, x).p_v) / (2 * d);
      EXPECT_NEAR(c.p_vv, fdv, 1e-6 * (1.0 + std::abs(c.p_vv))) << law.name();
      EXPECT_NEAR(c.c * c.c + c.p_v, 0.0, 1e-14 * std::abs(c.p_v)) << law.name();
    }
  }
}

TEST(Pressure, OutsideDomainIsDomainError) {
  const auto law = laws::isentropic(2.0, 1.0);
  EXPECT_THROW(law.eval(-1.0, 0.0), DomainError);
}

TEST(Validate, IsentropicSpeedRange) {
  const auto law = laws::isentropic(2.0, 1.0);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back({0.5 + 1.5 * i / 20.0, 0.0});
  const auto r = verify::validate_law(law, pts, 0.0);
  const auto* c = r.find("c");
  ASSERT_NE(c, nullptr);
  // c = sqrt(2) v^{-3/2}
  EXPECT_NEAR(c->min, std::sqrt(2.0) * std::pow(2.0, -1.5), 1e-12);
  EXPECT_NEAR(c->max, std::sqrt(2.0) * std::pow(0.5, -1.5), 1e-12);
}

TEST(Validate, MhdSupPmu) {
  const auto law = laws::mhd(Profile::sinusoidal(1.0, 0.1), 0.0, 2 * M_PI);
  std::vector<std::pair<double, double>> pts;
  for (int j = 0; j <= 400; ++j) pts.push_back({0.5, 2 * M_PI * j / 400.0});
  const auto r = verify::validate_law(law, pts, 0.0);
  const auto* pm = r.find("|p_mu|");
  ASSERT_NE(pm, nullptr);
  // sup |B'| v^-2 at v = 0.5 is 0.1 * 4, hit at the grid point x = 0.
  EXPECT_NEAR(pm->max, 0.4, 1e-8);
}

TEST(Validate, NegativePvvFlagged) {
  const auto base = laws::isentropic(2.0, 1.0);
  auto bad = laws::custom(
      [base](double v, double x) {
        auto d = base.kernel(v, x);
        if (v > 1.2 && v < 1.3) d.p_vv = -d.p_vv;
        return d;
      },
      "bad", ValidityDomain{}, std::numeric_limits<double>::infinity(), 1.5);
  std::vector<std::pair<double, double>> pts = {{1.0, 0.0}, {1.25, 0.0}, {1.5, 0.0}};
  try {
    verify::validate_law(bad, pts, 0.0);
    FAIL() << "expected HyperbolicityError";
  } catch (const HyperbolicityError& e) {
    EXPECT_NE(std::string(e.what()).find("1.25"), std::string::npos) << e.what();
  }
}
