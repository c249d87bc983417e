// charblow: simulate / trace / threshold / verify / duct.
//
// Exit codes: 0 ok, 1 a check failed, 2 bad configuration or arguments,
// 3 runtime failure (domain exit, NaN, model error).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "charblow/config.hpp"
#include "charblow/output.hpp"
#include "charblow/parallel.hpp"
#include "charblow/setup.hpp"
#include "charblow/verify.hpp"

namespace fs = std::filesystem;
using namespace charblow;
using output::json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  int refine = 0;
  bool quiet = false;
};

config::RunConfig load(const Flags& f) {
  std::ifstream in(f.config, std::ios::binary);
  if (!in) throw config::ConfigError({{0, 0, "cannot read config file '" + f.config + "'"}});
  std::stringstream ss;
  ss << in.rdbuf();
  config::RunConfig cfg = config::parse_config(ss.str());
  if (!f.out.empty()) cfg.output.dir = f.out;
  return cfg;
}

struct Level {
  std::size_t n = 0;
  solver::RunResult run;
  solver::BlowupReport report;
  std::vector<solver::CharacteristicTrace> traces;
};

Level run_level(const config::RunConfig& cfg, const coords::Chart& chart, std::size_t scale, bool with_traces) {
  Level L;
  const Grid g = setup::make_grid(cfg, scale);
  L.n = g.n;
  const GridState init = solver::make_initial(chart, g, setup::initial_spec(cfg));
  const auto opt = setup::run_options(cfg);
  L.run = solver::run(chart, init, opt);
  L.report = solver::analyze(chart, L.run, opt, cfg.run.nu);
  if (with_traces && L.run.history.size() >= 3) {
    const solver::TraceContext ctx(L.run.history, chart);
    for (double x0 : setup::trace_seeds(cfg, g)) {
      for (auto fam : setup::trace_families(cfg)) L.traces.push_back(solver::trace_characteristic(ctx, x0, fam));
    }
  }
  return L;
}

double max_over(const std::vector<solver::CharacteristicTrace>& t, bool alpha) {
  double m = 0.0;
  for (const auto& tr : t) m = std::max(m, alpha ? tr.max_alpha_residual() : tr.max_residual());
  return m;
}

json orders(const std::vector<double>& e) {
  json j = json::array();
  for (std::size_t k = 1; k < e.size(); ++k) j.push_back(output::finite(std::log2(e[k - 1] / e[k])));
  return j;
}

/// simulate and trace share the orchestration; trace skips snapshots and the report.
int cmd_run(const Flags& f, bool full) {
  const auto cfg = load(f);
  const PressureLaw law = setup::make_law(cfg);
  const auto chart = setup::make_chart(cfg, law);
  const auto levels = static_cast<std::size_t>(f.refine) + 1;
  auto res = parallel::map<Level>(levels, [&](std::size_t k) {
    return run_level(cfg, *chart, std::size_t{1} << k, true);
  });
  if (full && cfg.run.confirm_refinement) {
    for (std::size_t k = 0; k + 1 < levels; ++k) solver::confirm_refinement(res[k].report, res[k + 1].report);
    Level& last = res.back();
    if (last.report.T_obs) {
      const Level fine = run_level(cfg, *chart, std::size_t{1} << levels, false);
      solver::confirm_refinement(last.report, fine.report);
    }
  }
  const fs::path out = cfg.output.dir;
  for (const auto& L : res) {
    const fs::path dir = levels == 1 ? out : out / ("n" + std::to_string(L.n));
    output::write_traces(dir, L.traces);
    if (full) {
      output::write_snapshots(dir / "snapshots.csv", L.run.history, *chart,
                              static_cast<std::size_t>(cfg.output.snapshot_every));
      output::write_json(dir / "blowup_report.json", output::to_json(L.report));
    }
  }
  output::write_config_echo(out / "config_echo", cfg);
  json summary;
  std::vector<double> r, a;
  for (const auto& L : res) {
    r.push_back(max_over(L.traces, false));
    a.push_back(max_over(L.traces, true));
  }
  json lv = json::array();
  for (std::size_t k = 0; k < res.size(); ++k) {
    lv.push_back({{"n", res[k].n},
                  {"steps", res[k].run.steps},
                  {"stop_reason", res[k].report.stop_reason},
                  {"T_obs", output::opt(res[k].report.T_obs)},
                  {"max_residual", r[k]},
                  {"max_alpha_residual", a[k]}});
  }
  summary["levels"] = lv;
  summary["residual_order"] = orders(r);
  summary["alpha_residual_order"] = orders(a);
  output::write_json(out / (full ? "run_summary.json" : "trace_summary.json"), summary);
  if (!f.quiet) {
    if (full) std::cout << output::to_json(res.front().report).dump(2) << '\n';
    else std::cout << summary.dump(2) << '\n';
  }
  return 0;
}

int cmd_threshold(const Flags& f) {
  const auto cfg = load(f);
  const PressureLaw law = setup::make_law(cfg);
  const auto chart = setup::make_chart(cfg, law);
  const Grid g = setup::make_grid(cfg);
  const GridState init = solver::make_initial(*chart, g, setup::initial_spec(cfg));
  solver::CompactBox box = solver::compact_box(init);
  if (cfg.threshold.h_lo) box.h_lo = *cfg.threshold.h_lo;
  if (cfg.threshold.h_hi) box.h_hi = *cfg.threshold.h_hi;
  const auto b = riccati::sample_bounds(*chart, box.h_lo, box.h_hi, box.mu_lo, box.mu_hi,
                                        static_cast<int>(cfg.threshold.nh), static_cast<int>(cfg.threshold.nmu));
  json j;
  j["N"] = riccati::threshold_N(b, cfg.run.nu);
  j["nu"] = cfg.run.nu;
  j["sup_a1"] = b.sup_a1;
  j["sup_a0_plus"] = b.sup_a0_plus;
  j["sup_a2"] = b.sup_a2;
  j["inf_a2"] = b.inf_a2;
  const fs::path out = cfg.output.dir;
  output::write_json(out / "threshold.json", j);
  output::write_config_echo(out / "config_echo", cfg);
  if (!f.quiet) std::cout << j.dump(2) << '\n';
  return 0;
}

json to_json(const verify::CheckResult& c) {
  return {{"name", c.name},     {"applicable", c.applicable},         {"passed", c.passed},
          {"max_error", output::finite(c.max_error)}, {"tolerance", c.tolerance}, {"detail", c.detail}};
}

json to_json(const std::vector<verify::QuantityRange>& qs) {
  json a = json::array();
  for (const auto& q : qs) a.push_back({{"name", q.name}, {"min", q.min}, {"max", q.max}});
  return a;
}

int cmd_verify(const Flags& f) {
  const auto cfg = load(f);
  const PressureLaw law = setup::make_verified_law(cfg);
  const auto& dom = law.domain();
  const double v_lo = std::max(dom.v_min, 0.5), v_hi = std::min(dom.v_max, 2.0);
  const Grid g = setup::make_grid(cfg);
  const double x_hi = g.bc == Boundary::periodic ? g.x_hi - g.dx() : g.x_hi;
  const auto pts = verify::random_points(static_cast<std::size_t>(cfg.verify.samples), v_lo, v_hi, g.x_lo, x_hi,
                                         static_cast<std::uint64_t>(cfg.seed));
  std::vector<verify::CheckResult> checks;
  json report;
  bool valid = true;
  try {
    const auto vr = verify::validate_law(law, pts, cfg.model.h0);
    report["validation"] = {{"law", vr.law},
                            {"samples", vr.samples},
                            {"assumption", to_json(vr.assumption)},
                            {"proof", to_json(vr.proof)}};
    checks.push_back({"law_validation", 0.0, 0.0});
  } catch (const HyperbolicityError& e) {
    valid = false;
    verify::CheckResult c{"law_validation", 0.0, 0.0};
    c.passed = false;
    c.detail = std::string("HyperbolicityError: ") + e.what();
    checks.push_back(c);
    std::cerr << "HyperbolicityError: " << e.what() << '\n';
  }
  if (valid) {
    const auto chart = setup::make_chart(cfg, law);
    checks.push_back(verify::check_c_pmu(*chart, pts));
    checks.push_back(verify::check_rc_function(*chart, pts));
    checks.push_back(verify::check_rc_equi(law, pts));
    checks.push_back(verify::check_psystem(*chart, pts));
    checks.push_back(verify::check_mhd_closed_form(law, cfg.model.profile.build(1.0), pts));
  }
  checks.push_back(verify::check_duct_metric(setup::gas(cfg), setup::area(cfg)));
  bool all = true;
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back(to_json(c));
    if (!c.passed) {
      all = false;
      std::cerr << "check failed: " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
    }
  }
  report["passed"] = all;
  report["checks"] = arr;
  const fs::path out = cfg.output.dir;
  output::write_json(out / "verify_report.json", report);
  output::write_config_echo(out / "config_echo", cfg);
  if (!f.quiet) std::cout << report.dump(2) << '\n';
  return all ? 0 : 1;
}

int cmd_duct(const Flags& f) {
  const auto cfg = load(f);
  if (cfg.grid.boundary != "outflow") {
    throw config::ConfigError({{0, 0, "duct runs need grid.boundary = outflow"}});
  }
  const auto gas = setup::gas(cfg);
  const Profile area = setup::area(cfg);
  const auto in = setup::duct_initial(cfg);
  const auto levels = static_cast<std::size_t>(f.refine) + 1;
  struct DuctLevel {
    duct::DuctRun run;
    duct::MetricResiduals metric;
    double alpha = 0, beta = 0;
  };
  auto res = parallel::map<DuctLevel>(levels, [&](std::size_t k) {
    DuctLevel L;
    L.run = duct::run_duct(gas, area, setup::make_grid(cfg, std::size_t{1} << k), in, cfg.run.t_max, cfg.run.cfl);
    if (L.run.history.size() >= 3) {
      L.metric = duct::metric_identities_residual(L.run);
      for (double x0 : setup::trace_seeds(cfg, L.run.grid)) {
        const auto tr = duct::trace_alpha_residual(L.run, x0);
        L.alpha = std::max(L.alpha, tr.max_alpha_residual);
        L.beta = std::max(L.beta, tr.max_beta_residual);
      }
    }
    return L;
  });
  const fs::path out = cfg.output.dir;
  json lv = json::array();
  std::vector<double> ax, al;
  for (const auto& L : res) {
    const fs::path dir = levels == 1 ? out : out / ("n" + std::to_string(L.run.grid.n));
    output::write_duct_snapshots(dir / "duct_snapshots.csv", L.run,
                                 static_cast<std::size_t>(cfg.output.snapshot_every));
    lv.push_back({{"n", L.run.grid.n},
                  {"steps", L.run.steps},
                  {"metric", {{"a_t", L.metric.a_t}, {"a_x", L.metric.a_x}, {"adot_t", L.metric.adot_t},
                              {"adot_x", L.metric.adot_x}}},
                  {"max_alpha_residual", L.alpha},
                  {"max_beta_residual", L.beta}});
    ax.push_back(L.metric.max());
    al.push_back(L.alpha);
  }
  json j;
  j["levels"] = lv;
  j["metric_order"] = orders(ax);
  j["alpha_residual_order"] = orders(al);
  output::write_json(out / "duct_report.json", j);
  output::write_config_echo(out / "config_echo", cfg);
  if (!f.quiet) std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient blowup along characteristics of p(v, x) wave systems"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "run configuration")->required();
    sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
    sub->add_option("--refine", flags.refine, "also run at 2n, ..., 2^K n")->check(CLI::Range(0, 8));
    sub->add_flag("--quiet", flags.quiet, "no summary on stdout");
  };
  auto* sim = app.add_subcommand("simulate", "run the solver, write snapshots, traces and the blowup report");
  auto* tr = app.add_subcommand("trace", "run the solver and write characteristic traces");
  auto* th = app.add_subcommand("threshold", "blowup threshold N and coefficient bounds");
  auto* ve = app.add_subcommand("verify", "identity checks; exit 1 if any fails");
  auto* du = app.add_subcommand("duct", "variable-area duct run with metric identity residuals");
  for (auto* s : {sim, tr, th, ve, du}) add_common(s);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*sim) return cmd_run(flags, true);
    if (*tr) return cmd_run(flags, false);
    if (*th) return cmd_threshold(flags);
    if (*ve) return cmd_verify(flags);
    if (*du) return cmd_duct(flags);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
