#include <cmath>

#include <gtest/gtest.h>

#include "charblow/solver.hpp"

using namespace charblow;

namespace {

GridState constant_state(std::size_t n, double h, double u) {
  const Grid g{n, 0.0, 1.0, Boundary::periodic};
  return {g, 0.0, std::vector<double>(n, h), std::vector<double>(n, u)};
}

}  // namespace

TEST(Solver, ConstantStateUnchanged) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  for (auto bc : {Boundary::periodic, Boundary::outflow}) {
    GridState s = constant_state(64, 2.5, 0.0);
    s.grid.bc = bc;
    solver::RunOptions opt;
    opt.t_max = 2.0;
    const auto run = solver::run(*chart, s, opt);
    for (std::size_t i = 0; i < 64; ++i) {
      EXPECT_NEAR(run.final_state.h[i], 2.5, 1e-14);
      EXPECT_NEAR(run.final_state.u[i], 0.0, 1e-14);
    }
  }
}

TEST(Solver, StationaryEntropyState) {
  const auto chart = coords::make_chart(laws::mhd(Profile::sinusoidal(1.0, 0.1), 0.0, 2 * M_PI));
  const Grid g{200, 0.0, 2 * M_PI, Boundary::periodic};
  solver::InitialSpec spec;
  spec.preset = solver::Preset::constant;
  const auto init = solver::make_initial(*chart, g, spec);
  // p(h(x), x) is constant
  const double p0 = chart->pressure_and_speed(init.h[0], 0.0).first;
  for (std::size_t i = 0; i < g.n; ++i) EXPECT_NEAR(chart->pressure_and_speed(init.h[i], g.x(i)).first, p0, 1e-12);
  solver::RunOptions opt;
  opt.t_max = 5.0;
  opt.keep_history = false;
  const auto run = solver::run(*chart, init, opt);
  for (double u : run.final_state.u) EXPECT_LE(std::abs(u), 1e-6);
}

TEST(Solver, SelfConvergence) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  std::vector<GridState> fin;
  for (std::size_t n : {200, 400, 800}) {
    const Grid g{n, 0.0, 2 * M_PI, Boundary::periodic};
    solver::InitialSpec spec;
    spec.preset = solver::Preset::sine;
    spec.amplitude = 0.2;
    solver::RunOptions opt;
    opt.t_max = 1.0;
    opt.keep_history = false;
    fin.push_back(solver::run(*chart, solver::make_initial(*chart, g, spec), opt).final_state);
  }
  auto l2 = [](const GridState& a, const GridState& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.h.size(); ++i) {
      const double dh = a.h[i] - b.h[2 * i], du = a.u[i] - b.u[2 * i];
      s += dh * dh + du * du;
    }
    return std::sqrt(s * a.grid.dx());
  };
  const double order = std::log2(l2(fin[0], fin[1]) / l2(fin[1], fin[2]));
  EXPECT_GE(order, 1.8);
}

TEST(Solver, RejectsBadCfl) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  solver::RunOptions opt;
  opt.cfl = 1.5;
  EXPECT_THROW(solver::run(*chart, constant_state(32, 2.0, 0.0), opt), GridError);
}

TEST(Solver, EmptyRunKeepsOneLevel) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  solver::RunOptions opt;
  opt.t_max = 0.0;
  const auto run = solver::run(*chart, constant_state(32, 2.0, 0.0), opt);
  EXPECT_EQ(run.history.size(), 1u);
  EXPECT_EQ(run.steps, 0u);
}

TEST(DetectBlowup, Bounded) {
  std::vector<solver::GradientSample> g;
  for (int k = 0; k <= 100; ++k) g.push_back({0.01 * k, 5.0 + 5.0 * std::sin(k)});
  EXPECT_FALSE(solver::detect_blowup(g, 1e4).found);
}

TEST(DetectBlowup, CutInsensitive) {
  // G = 2 / (1 - 2 t), as for y' = -y^2 from y0 = -2.
  std::vector<solver::GradientSample> g;
  for (int k = 0; k < 500000; ++k) {
    const double t = 1e-6 * k;
    g.push_back({t, 2.0 / (1.0 - 2.0 * t)});
  }
  const auto a = solver::detect_blowup(g, 1e3), b = solver::detect_blowup(g, 1e4);
  ASSERT_TRUE(a.found && b.found);
  EXPECT_LT(std::abs(a.T_obs - b.T_obs) / b.T_obs, 0.02);
  EXPECT_NEAR(b.T_obs, 0.5, 1e-3);
}

TEST(DetectBlowup, Extrapolation) {
  std::vector<solver::GradientSample> g;
  for (int k = 0; k <= 40; ++k) {
    const double t = 0.01 * k;
    g.push_back({t, 2.0 / (1.0 - 2.0 * t)});
  }
  EXPECT_FALSE(solver::detect_blowup(g, 1e4).found);
  const auto d = solver::detect_blowup(g, 1e4, true);
  ASSERT_TRUE(d.found);
  EXPECT_TRUE(d.extrapolated);
  EXPECT_NEAR(d.T_obs, 0.5, 1e-3);
}

TEST(DetectBlowup, NonMonotoneTime) {
  std::vector<solver::GradientSample> g{{0.0, 1.0}, {0.2, 1.0}, {0.1, 1.0}};
  EXPECT_THROW(solver::detect_blowup(g, 1e4), GridError);
}

TEST(Trace, ConstantStatePath) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  const double h = 2 * std::sqrt(2.0);  // v = 1, c = sqrt(2)
  GridState s = constant_state(64, h, 0.0);
  s.grid.x_hi = 10.0;
  solver::RunOptions opt;
  opt.t_max = 1.0;
  const auto run = solver::run(*chart, s, opt);
  const double c0 = std::sqrt(2.0);
  for (auto fam : {solver::CharFamily::forward, solver::CharFamily::backward}) {
    const auto tr = solver::trace_characteristic(run.history, *chart, 3.0, fam);
    ASSERT_FALSE(tr.samples.empty());
    const double sgn = fam == solver::CharFamily::forward ? 1.0 : -1.0;
    for (const auto& p : tr.samples) EXPECT_NEAR(p.x, 3.0 + sgn * c0 * p.t, 1e-10);
  }
}

TEST(Trace, PsystemRiccatiResidual) {
  // d(1/y)/dt = a2 along forward characteristics
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
    const auto tr = solver::trace_characteristic(run.history, *chart, 1.0, solver::CharFamily::forward);
    for (const auto& s : tr.samples) {
      EXPECT_EQ(s.a0, 0.0);
      EXPECT_EQ(s.a1, 0.0);
    }
    res.push_back(tr.max_residual());
  }
  EXPECT_LT(res[0], 1e-2);
  EXPECT_GE(std::log2(res[0] / res[1]), 1.8);
}

TEST(Analyze, PsystemBlowupReport) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  solver::InitialSpec spec;
  spec.center = 0.0;
  spec.width = 1.0;
  spec.target_y0 = -2.0;
  solver::RunOptions opt;
  opt.t_max = 2.0;
  std::vector<solver::BlowupReport> reps;
  for (std::size_t n : {400, 800}) {
    const Grid g{n, -4.0, 4.0, Boundary::outflow};
    reps.push_back(solver::analyze(*chart, solver::run(*chart, solver::make_initial(*chart, g, spec), opt), opt, 0.01));
  }
  auto& r = reps[0];
  EXPECT_EQ(r.N, 0.0);
  EXPECT_NEAR(r.y0_min, -2.0, 1e-9);
  ASSERT_TRUE(r.T_obs);
  EXPECT_TRUE(r.resolution_limited);
  solver::confirm_refinement(r, reps[1]);
  EXPECT_TRUE(r.refinement_confirmed);
  EXPECT_FALSE(r.resolution_limited);
  ASSERT_TRUE(r.T_pred);
  EXPECT_LE(*r.T_obs, *r.T_pred);
}
