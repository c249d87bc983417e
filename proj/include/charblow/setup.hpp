#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "charblow/chart.hpp"
#include "charblow/config.hpp"
#include "charblow/duct.hpp"
#include "charblow/pressure.hpp"
#include "charblow/solver.hpp"

// Builds library objects from a validated RunConfig.
namespace charblow::setup {

/// Reads "v,x,p" rows (one header line allowed, '#' comments skipped) on a
/// rectangular (v, x) grid. A single x value gives an x-independent law.
inline PressureLaw load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open pressure table '" + path + "'");
  std::map<std::pair<double, double>, double> rows;
  std::set<double> vs, xs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double v = 0, x = 0, p = 0;
    if (!(is >> v >> x >> p)) {
      if (line_no == 1) continue;
      throw ModelError(path + ":" + std::to_string(line_no) + ": expected v,x,p");
    }
    rows[{v, x}] = p;
    vs.insert(v);
    xs.insert(x);
  }
  std::vector<double> v(vs.begin(), vs.end()), x(xs.begin(), xs.end());
  std::vector<double> p(v.size() * x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto it = rows.find({v[i], x[j]});
      if (it == rows.end()) throw ModelError(path + ": table is not rectangular");
      p[j * v.size() + i] = it->second;
    }
  }
  return laws::tabulated(std::move(v), std::move(x), std::move(p));
}

inline PressureLaw make_law(const config::RunConfig& cfg) {
  const auto& m = cfg.model;
  PressureLaw law;
  if (m.name == "isentropic" || m.name == "psystem") {
    law = laws::isentropic(m.gamma, m.K);
  } else if (m.name == "gamma_entropy") {
    law = laws::gamma_entropy(m.gamma, m.K, m.cv, m.profile.build(0.0));
  } else if (m.name == "mhd") {
    law = laws::mhd(m.profile.build(1.0), cfg.grid.x_lo, cfg.grid.x_hi);
  } else if (m.name == "tabulated") {
    law = load_table(m.table);
  } else {
    throw ModelError("unknown model '" + m.name + "'");
  }
  if (m.v_min) law.domain().v_min = *m.v_min;
  if (m.v_max) law.domain().v_max = *m.v_max;
  return law;
}

/// The law with p_vv sign-flipped; used to exercise the hyperbolicity checks.
inline PressureLaw flip_pvv(const PressureLaw& base) {
  auto kernel = [base](double v, double x) {
    PressureDerivs d = base.kernel(v, x);
    d.p_vv = -d.p_vv;
    d.p_xvv = -d.p_xvv;
    return d;
  };
  return laws::custom(kernel, base.name() + "(flipped p_vv)", base.domain(), base.v_star(),
                      base.tail_exponent());
}

inline PressureLaw make_verified_law(const config::RunConfig& cfg) {
  PressureLaw law = make_law(cfg);
  if (cfg.verify.corrupt == "flip_pvv") law = flip_pvv(law);
  return law;
}

inline std::shared_ptr<const coords::Chart> make_chart(const config::RunConfig& cfg, const PressureLaw& law) {
  return coords::make_chart(law, cfg.model.h0, static_cast<std::size_t>(cfg.coords.cache_nodes));
}

inline Grid make_grid(const config::RunConfig& cfg, std::size_t scale = 1) {
  Grid g{static_cast<std::size_t>(cfg.grid.n) * scale, cfg.grid.x_lo, cfg.grid.x_hi,
         boundary_from(cfg.grid.boundary)};
  g.validate();
  return g;
}

inline solver::InitialSpec initial_spec(const config::RunConfig& cfg) {
  const auto& i = cfg.initial;
  solver::InitialSpec s;
  s.preset = *solver::preset_from(i.preset);
  s.family = *solver::family_from(i.family);
  s.amplitude = i.amplitude;
  s.target_y0 = i.target_y0;
  s.center = i.center;
  s.width = i.width;
  s.wavenumber = i.wavenumber;
  s.pressure = i.pressure;
  return s;
}

inline solver::RunOptions run_options(const config::RunConfig& cfg) {
  solver::RunOptions o;
  o.cfl = cfg.run.cfl;
  o.t_max = cfg.run.t_max;
  o.blowup_cut = cfg.run.blowup_cut;
  o.resolution_theta = cfg.run.resolution_theta;
  return o;
}

/// Explicit seeds, or trace.count points spread evenly over the grid.
inline std::vector<double> trace_seeds(const config::RunConfig& cfg, const Grid& g) {
  if (!cfg.trace.seeds.empty()) return cfg.trace.seeds;
  std::vector<double> s;
  const auto k = static_cast<std::size_t>(cfg.trace.count);
  for (std::size_t j = 0; j < k; ++j) {
    s.push_back(g.x_lo + g.length() * (static_cast<double>(j) + 0.5) / static_cast<double>(k));
  }
  return s;
}

inline std::vector<solver::CharFamily> trace_families(const config::RunConfig& cfg) {
  if (cfg.trace.family == "forward") return {solver::CharFamily::forward};
  if (cfg.trace.family == "backward") return {solver::CharFamily::backward};
  return {solver::CharFamily::forward, solver::CharFamily::backward};
}

inline duct::Gas gas(const config::RunConfig& cfg) { return {cfg.duct.gamma, cfg.duct.K, cfg.duct.cv}; }

inline Profile area(const config::RunConfig& cfg) { return cfg.duct.area.build(1.0); }

inline duct::DuctInitial duct_initial(const config::RunConfig& cfg) {
  duct::DuctInitial in;
  in.v0 = cfg.duct.v0;
  in.amp = cfg.duct.amp;
  in.u_amp = cfg.duct.u_amp;
  in.center = cfg.duct.center;
  in.width = cfg.duct.width;
  in.X_lo = cfg.duct.X_lo;
  in.entropy = cfg.duct.entropy.build(0.0);
  return in;
}

}  // namespace charblow::setup
