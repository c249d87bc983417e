#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "charblow/chart.hpp"
#include "charblow/config.hpp"
#include "charblow/duct.hpp"
#include "charblow/gradients.hpp"
#include "charblow/solver.hpp"

// File emission. Floats go out with 17 significant digits.
namespace charblow::output {

using json = nlohmann::ordered_json;

inline std::string fmt17(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline std::ofstream open(const std::filesystem::path& p) {
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw Error("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open '" + p.string() + "' for writing");
  return out;
}

inline void close(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw Error("write to '" + p.string() + "' failed");
}

/// One row per node per written level. Every `every`-th stored level is written
/// (0 writes the first and last only).
inline void write_snapshots(const std::filesystem::path& p, const std::vector<GridState>& history,
                            const coords::Chart& chart, std::size_t every = 0) {
  auto out = open(p);
  out << "t,x,v,u,h,p,c,alpha,beta,y,q,fwdRC,bwdRC\n";
  for (std::size_t k = 0; k < history.size(); ++k) {
    const bool keep = k == 0 || k + 1 == history.size() || (every > 0 && k % every == 0);
    if (!keep) continue;
    const GridState& s = history[k];
    const auto f = gradients::compute(s, chart);
    for (std::size_t i = 0; i < s.h.size(); ++i) {
      out << fmt17(s.t) << ',' << fmt17(s.grid.x(i)) << ',' << fmt17(f.v[i]) << ',' << fmt17(s.u[i]) << ','
          << fmt17(s.h[i]) << ',' << fmt17(f.p[i]) << ',' << fmt17(f.c[i]) << ',' << fmt17(f.alpha[i]) << ','
          << fmt17(f.beta[i]) << ',' << fmt17(f.y[i]) << ',' << fmt17(f.q[i]) << ','
          << gradients::to_string(f.rc[i].forward) << ',' << gradients::to_string(f.rc[i].backward) << '\n';
    }
  }
  close(out, p);
}

/// Traces back to back; traces_index.csv gives each trace's rows.
inline void write_traces(const std::filesystem::path& dir, const std::vector<solver::CharacteristicTrace>& traces) {
  const auto p = dir / "traces.csv";
  const auto pi = dir / "traces_index.csv";
  auto out = open(p);
  auto idx = open(pi);
  out << "t,x,c,yq,a0,a1,a2,residual\n";
  idx << "trace,family,x0,first_row,rows,truncated,max_residual,max_alpha_residual\n";
  std::size_t row = 0;
  for (std::size_t j = 0; j < traces.size(); ++j) {
    const auto& tr = traces[j];
    idx << j << ',' << solver::to_string(tr.family) << ',' << fmt17(tr.x0) << ',' << row << ','
        << tr.samples.size() << ',' << (tr.truncated ? "true" : "false") << ',' << fmt17(tr.max_residual()) << ','
        << fmt17(tr.max_alpha_residual()) << '\n';
    for (const auto& s : tr.samples) {
      out << fmt17(s.t) << ',' << fmt17(s.x) << ',' << fmt17(s.c) << ',' << fmt17(s.yq) << ',' << fmt17(s.a0)
          << ',' << fmt17(s.a1) << ',' << fmt17(s.a2) << ',' << fmt17(s.residual) << '\n';
      ++row;
    }
  }
  close(out, p);
  close(idx, pi);
}

inline json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline json finite(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const riccati::CoefficientBounds& b) {
  return {{"sup_a1", b.sup_a1}, {"sup_a0_plus", b.sup_a0_plus}, {"sup_a2", b.sup_a2}, {"inf_a2", finite(b.inf_a2)}};
}

inline json to_json(const solver::BlowupReport& r) {
  json j;
  j["N"] = r.N;
  j["nu"] = r.nu;
  j["y0_min"] = r.y0_min;
  j["q0_min"] = r.q0_min;
  j["T_pred"] = opt(r.T_pred);
  j["T_obs"] = opt(r.T_obs);
  j["refinement_confirmed"] = r.refinement_confirmed;
  j["resolution_limited"] = r.resolution_limited;
  j["extrapolated"] = r.extrapolated;
  j["n"] = r.n;
  j["h0"] = r.h0;
  j["bounds"] = to_json(r.bounds);
  j["critical_family"] = std::string(solver::to_string(r.critical_family));
  j["critical_x0"] = r.critical_x0;
  j["sup_a2_trace"] = r.sup_a2_trace;
  j["inf_a2_trace"] = finite(r.inf_a2_trace);
  j["stop_reason"] = r.stop_reason;
  return j;
}

inline void write_json(const std::filesystem::path& p, const json& j) {
  auto out = open(p);
  out << j.dump(2) << '\n';
  close(out, p);
}

inline void write_config_echo(const std::filesystem::path& p, const config::RunConfig& cfg) {
  auto out = open(p);
  out << config::echo(cfg);
  close(out, p);
}

/// Duct rows: t, x, z, u, X, m, a, v.
inline void write_duct_snapshots(const std::filesystem::path& p, const duct::DuctRun& run, std::size_t every = 0) {
  auto out = open(p);
  out << "t,x,z,u,X,m,a,v\n";
  const auto& H = run.history;
  for (std::size_t k = 0; k < H.size(); ++k) {
    const bool keep = k == 0 || k + 1 == H.size() || (every > 0 && k % every == 0);
    if (!keep) continue;
    for (std::size_t i = 0; i < run.grid.n; ++i) {
      out << fmt17(H[k].t) << ',' << fmt17(run.grid.x(i)) << ',' << fmt17(H[k].z[i]) << ',' << fmt17(H[k].u[i])
          << ',' << fmt17(H[k].X[i]) << ',' << fmt17(run.m[i]) << ',' << fmt17(run.area(H[k].X[i]).f) << ','
          << fmt17(run.gas.v_of_z(H[k].z[i])) << '\n';
    }
  }
  close(out, p);
}

}  // namespace charblow::output
