#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "charblow/config.hpp"
#include "charblow/output.hpp"
#include "charblow/setup.hpp"

using namespace charblow;
namespace fs = std::filesystem;

TEST(Config, MinimalDefaults) {
  const auto cfg = config::parse_config("[model]\nname = psystem\ngamma = 2\n");
  EXPECT_EQ(cfg.model.name, "psystem");
  EXPECT_EQ(cfg.model.gamma, 2.0);
  EXPECT_EQ(cfg.grid.n, 400);
  EXPECT_EQ(cfg.grid.boundary, "periodic");
  EXPECT_EQ(cfg.run.cfl, 0.5);
  EXPECT_EQ(cfg.run.nu, 0.01);
  EXPECT_EQ(cfg.seed, 12345);
}

TEST(Config, CflRange) {
  try {
    config::parse_config("[run]\ncfl = 1.5\n");
    FAIL();
  } catch (const config::ConfigError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].line, 2);
    EXPECT_NE(e.issues()[0].message.find("0.9"), std::string::npos) << e.what();
  }
}

TEST(Config, AllErrorsReported) {
  try {
    config::parse_config("[grid]\nn = 4\n[run]\nbogus = 1\n");
    FAIL();
  } catch (const config::ConfigError& e) {
    ASSERT_EQ(e.issues().size(), 2u) << e.what();
    EXPECT_EQ(e.issues()[0].line, 2);
    EXPECT_EQ(e.issues()[1].line, 4);
  }
}

TEST(Config, TypeErrorAndDuplicate) {
  try {
    config::parse_config("[grid]\nn = many\nx_lo = 0\nx_lo = 1\n");
    FAIL();
  } catch (const config::ConfigError& e) {
    EXPECT_EQ(e.issues().size(), 2u) << e.what();
  }
}

TEST(Config, EchoRoundTrip) {
  const char* text = R"(seed = 7
[model]
name = mhd
profile.kind = sinusoidal
profile.amp = 0.1
[grid]
n = 256
x_hi = 6.283185307179586
[initial]
preset = sine
target_y0 = -0.3
[trace]
seeds = 0.1, 0.7
)";
  const auto cfg = config::parse_config(text);
  EXPECT_EQ(cfg.model.gamma, 2.0);
  EXPECT_EQ(config::parse_config(config::echo(cfg)), cfg);
  const auto def = config::parse_config("");
  EXPECT_EQ(config::parse_config(config::echo(def)), def);
}

TEST(Output, EmptyRunSnapshot) {
  auto cfg = config::parse_config("[grid]\nn = 32\n[run]\nt_max = 0\n");
  const auto law = setup::make_law(cfg);
  const auto chart = setup::make_chart(cfg, law);
  const auto g = setup::make_grid(cfg);
  const auto run = solver::run(*chart, solver::make_initial(*chart, g, setup::initial_spec(cfg)),
                               setup::run_options(cfg));
  const fs::path dir = fs::temp_directory_path() / "charblow_output_test";
  fs::remove_all(dir);
  output::write_snapshots(dir / "snapshots.csv", run.history, *chart);
  std::ifstream in(dir / "snapshots.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,v,u,h,p,c,alpha,beta,y,q,fwdRC,bwdRC");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("0,", 0), 0u);
    ++rows;
  }
  EXPECT_EQ(rows, 32);
  fs::remove_all(dir);
}

TEST(Output, BlowupReportKeys) {
  const auto chart = coords::make_chart(laws::isentropic(2.0, 1.0));
  solver::InitialSpec spec;
  spec.center = 0.0;
  spec.width = 1.0;
  spec.target_y0 = -2.0;
  solver::RunOptions opt;
  opt.t_max = 2.0;
  const Grid g{200, -4.0, 4.0, Boundary::outflow};
  const auto rep = solver::analyze(*chart, solver::run(*chart, solver::make_initial(*chart, g, spec), opt), opt, 0.01);
  const auto j = output::to_json(rep);
  for (const char* k : {"N", "nu", "y0_min", "q0_min", "T_pred", "T_obs", "refinement_confirmed"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_TRUE(j["T_obs"].is_number());
}

TEST(Output, SeventeenDigits) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(output::fmt17(x)), x);
}

TEST(Output, UnwritablePathHasContext) {
  try {
    output::write_json("/proc/charblow/nope.json", output::json::object());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/charblow"), std::string::npos);
  }
}
