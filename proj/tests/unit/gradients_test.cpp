#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "charblow/gradients.hpp"
#include "charblow/solver.hpp"

using namespace charblow;
using gradients::RC;

TEST(Gradients, AlphaBeta) {
  const double c = 1.7, p_mu = 0.3;
  const auto st = gradients::alpha_beta(0.0, -p_mu / c, p_mu, c);
  EXPECT_NEAR(st.alpha, 0.0, 1e-16);
  EXPECT_NEAR(st.beta, 0.0, 1e-16);

  // Isentropic: s_x = u_x + h_x, r_x = u_x - h_x.
  const auto sr = gradients::alpha_beta(1.0, 1.0, 0.0, 2.0);
  EXPECT_EQ(sr.alpha, 2.0);
  EXPECT_EQ(sr.beta, 0.0);

  const auto ux = gradients::alpha_beta(1.0, 0.0, 0.0, 1.0);
  EXPECT_EQ(ux.alpha, 1.0);
  EXPECT_EQ(ux.beta, 1.0);
}

TEST(Gradients, YQ) {
  EXPECT_NEAR(gradients::y_q(3.0, 0.0, 2.0, 0.0).y, 3.0 * std::sqrt(2.0), 1e-15);
  const auto s = gradients::y_q(0.0, 0.0, 1.3, 0.5);
  EXPECT_EQ(s.y, -0.5);
  EXPECT_EQ(s.q, 0.5);
}

TEST(Gradients, YFromMhdClosedForms) {
  // B = 1 + mu at mu = 0, h = 1, u_x = h_x = 0.
  const auto law = laws::mhd(Profile::linear(1.0, 1.0), -0.5, 0.5);
  const auto chart = coords::make_chart(law, 0.0);
  const auto q = chart->at(1.0, 0.0);
  const auto ab = gradients::alpha_beta(0.0, 0.0, q.p_mu, q.c);
  const double y = gradients::y_q(ab.alpha, ab.beta, q.c, q.I).y;
  const double h = 1.0, B = 1.0, dB = 1.0;
  const double closed = std::pow(h, 1.5) / (4 * std::sqrt(B)) * (0.0 + 0.0 - h / 5 * dB / B);
  EXPECT_NEAR(y, closed, 1e-14);
}

TEST(Gradients, RoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-3.0, 3.0), dc(0.2, 4.0);
  for (int k = 0; k < 1000; ++k) {
    const double ux = d(rng), hx = d(rng), pmu = d(rng), c = dc(rng), I = d(rng);
    const auto ab = gradients::alpha_beta(ux, hx, pmu, c);
    const auto yq = gradients::y_q(ab.alpha, ab.beta, c, I);
    const auto ab2 = gradients::alpha_beta_from_yq(yq.y, yq.q, c, I);
    const auto raw = gradients::raw_from_alpha_beta(ab2.alpha, ab2.beta, pmu, c);
    EXPECT_NEAR(raw.u_x, ux, 1e-12 * (1 + std::abs(ux)));
    EXPECT_NEAR(raw.h_x, hx, 1e-12 * (1 + std::abs(hx) + std::abs(pmu / c)));
  }
}

TEST(Gradients, Classify) {
  EXPECT_EQ(gradients::classify(1.0, -1.0), (gradients::RCPair{RC::R, RC::C}));
  EXPECT_EQ(gradients::classify(0.0, 0.0), (gradients::RCPair{RC::neutral, RC::neutral}));
  EXPECT_EQ(gradients::classify(-0.5, -0.5), (gradients::RCPair{RC::C, RC::C}));
  for (double s : {1e-6, 3.0, 1e6}) {
    EXPECT_EQ(gradients::classify(s * 1.0, s * -2.0), gradients::classify(1.0, -2.0));
  }
}

TEST(Gradients, TransitionSign) {
  EXPECT_EQ(gradients::rc_transition_sign(1.0, 0.5), 1);
  EXPECT_EQ(gradients::rc_transition_sign(0.0, 0.5), 0);
  EXPECT_EQ(gradients::rc_transition_sign(-1.0, 0.5), -1);
}

TEST(Gradients, RcConsistency) {
  const auto iso = gradients::rc_consistency_check(laws::isentropic(1.4, 1.0), 1.2, 0.3);
  EXPECT_EQ(iso.lhs, 0.0);
  EXPECT_EQ(iso.rhs, 0.0);
  const auto ge = laws::gamma_entropy(1.4, 1.0, 1.0, Profile::linear(0.0, 0.1));
  EXPECT_LE(gradients::rc_consistency_check(ge, 1.0, 0.0).diff, 1e-8);
  // -A'/(gamma A) with A = e^{0.1 x}
  EXPECT_NEAR(gradients::rc_consistency_check(ge, 1.0, 0.0).lhs, -0.1 / 1.4, 1e-12);
  const auto mh = laws::mhd(Profile::linear(1.0, 1.0), -0.5, 0.5);
  EXPECT_LE(gradients::rc_consistency_check(mh, 1.0, 0.0).diff, 1e-8);
  EXPECT_NEAR(gradients::rc_consistency_check(mh, 1.0, 0.0).lhs, -0.5, 1e-12);
}

TEST(Gradients, DirectionalResidualsConstantState) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  const Grid g{64, 0.0, 1.0, Boundary::periodic};
  const GridState s{g, 0.0, std::vector<double>(64, 2.0), std::vector<double>(64, 0.3)};
  const auto r = gradients::directional_residuals(s, *chart);
  EXPECT_NEAR(r.forward, 0.0, 1e-14);
  EXPECT_NEAR(r.backward, 0.0, 1e-14);
}

TEST(Gradients, DirectionalResidualsStationaryEntropy) {
  const auto chart = coords::make_chart(laws::gamma_entropy(1.4, 1.0, 1.0, Profile::sinusoidal(0.0, 0.1)));
  const Grid g{400, 0.0, 2 * M_PI, Boundary::periodic};
  solver::InitialSpec spec;
  spec.preset = solver::Preset::constant;
  const auto s = solver::make_initial(*chart, g, spec);
  const auto r = gradients::directional_residuals(s, *chart);
  EXPECT_LE(r.forward, 1e-8);
  EXPECT_LE(r.backward, 1e-8);
}

TEST(Gradients, DirectionalResidualRatio) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  std::vector<double> res;
  for (std::size_t n : {200, 400}) {
    const Grid g{n, 0.0, 2 * M_PI, Boundary::periodic};
    solver::InitialSpec spec;
    spec.preset = solver::Preset::sine;
    spec.amplitude = 0.2;
    solver::RunOptions opt;
    opt.t_max = 0.5;
    const auto run = solver::run(*chart, solver::make_initial(*chart, g, spec), opt);
    double m = 0.0;
    for (std::size_t k = 1; k + 1 < run.history.size(); ++k) {
      const auto r = gradients::directional_residuals(run.history[k - 1], run.history[k], run.history[k + 1], *chart);
      m = std::max({m, r.forward, r.backward});
    }
    res.push_back(m);
  }
  EXPECT_GE(res[0] / res[1], 3.5) << res[0] << " " << res[1];
}

TEST(Gradients, ComputeOnStationaryState) {
  const auto chart = coords::make_chart(laws::mhd(Profile::sinusoidal(1.0, 0.1), 0.0, 2 * M_PI));
  const Grid g{256, 0.0, 2 * M_PI, Boundary::periodic};
  solver::InitialSpec spec;
  spec.preset = solver::Preset::constant;
  const auto s = solver::make_initial(*chart, g, spec);
  const auto f = gradients::compute(s, *chart);
  for (std::size_t i = 0; i < g.n; ++i) {
    EXPECT_NEAR(f.alpha[i], 0.0, 1e-7);
    EXPECT_NEAR(f.beta[i], 0.0, 1e-7);
    EXPECT_NEAR(f.y[i], -f.I[i], 1e-6);
  }
}
