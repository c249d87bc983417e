#pragma once

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "charblow/errors.hpp"
#include "charblow/profile.hpp"

// Run configuration: an INI-style text format.
//
//   # comment            ; comment
//   [section]
//   key = value          -> section.key
//   a.b = value          -> section.a.b  (or a.b at top level)
//
// Values are numbers, booleans (true/false), bare or double-quoted strings, or
// comma-separated number lists. Every error is collected with its line and column.
namespace charblow::config {

struct ConfigIssue {
  int line = 0;
  int col = 0;
  std::string message;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues) : Error(render(issues)), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string render(const std::vector<ConfigIssue>& issues) {
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
      if (i) os << '\n';
      os << issues[i].line << ':' << issues[i].col << ": " << issues[i].message;
    }
    return os.str();
  }
  std::vector<ConfigIssue> issues_;
};

struct ProfileConfig {
  std::string kind = "constant";
  std::optional<double> c0;
  double amp = 0.0, k = 1.0, phase = 0.0, center = 0.0, width = 1.0;
  bool operator==(const ProfileConfig&) const = default;

  Profile build(double default_c0) const {
    Profile p;
    p.kind = profile_kind_from(kind);
    p.c0 = c0.value_or(default_c0);
    p.amp = amp;
    p.k = k;
    p.phase = phase;
    p.center = center;
    p.width = width;
    return p;
  }
};

struct RunConfig {
  struct Model {
    std::string name = "isentropic";
    double gamma = 2.0, K = 1.0, cv = 1.0;
    ProfileConfig profile;
    std::string table;
    std::optional<double> v_min, v_max;
    std::optional<double> h0;
    bool operator==(const Model&) const = default;
  } model;
  struct GridCfg {
    long n = 400;
    double x_lo = 0.0, x_hi = 1.0;
    std::string boundary = "periodic";
    bool operator==(const GridCfg&) const = default;
  } grid;
  struct Run {
    double cfl = 0.5, t_max = 1.0, nu = 0.01, blowup_cut = 1e4;
    double resolution_theta = 0.05;
    bool confirm_refinement = true;
    bool operator==(const Run&) const = default;
  } run;
  struct Initial {
    std::string preset = "gaussian", family = "forward";
    double amplitude = 0.1;
    std::optional<double> target_y0;
    double center = 0.5, width = 0.1, wavenumber = 1.0;
    std::optional<double> pressure;
    bool operator==(const Initial&) const = default;
  } initial;
  struct Trace {
    std::vector<double> seeds;
    long count = 8;
    std::string family = "forward";
    bool operator==(const Trace&) const = default;
  } trace;
  struct Duct {
    double gamma = 1.4, K = 1.0, cv = 1.0;
    ProfileConfig area;
    double v0 = 1.0, amp = 0.1, u_amp = 0.1, center = 0.0, width = 1.0, X_lo = 0.0;
    ProfileConfig entropy;
    bool operator==(const Duct&) const = default;
  } duct;
  struct Output {
    std::string dir = "out";
    long snapshot_every = 0;
    bool operator==(const Output&) const = default;
  } output;
  struct Coords {
    long cache_nodes = 4096;
    bool operator==(const Coords&) const = default;
  } coords;
  struct Threshold {
    std::optional<double> h_lo, h_hi;
    long nh = 32, nmu = 128;
    bool operator==(const Threshold&) const = default;
  } threshold;
  struct Verify {
    std::string corrupt = "none";
    long samples = 1000;
    bool operator==(const Verify&) const = default;
  } verify;
  long seed = 12345;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

struct Value {
  std::string text;
  int line = 0, col = 0;
  bool quoted = false;
};

inline std::optional<double> to_number(std::string_view s) {
  double v = 0.0;
  if (s.empty()) return std::nullopt;
  const char* b = s.data();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string quote(const std::string& s) { return '"' + s + '"'; }

/// One registered key: how to set it, how to echo it.
struct Field {
  std::string key;
  std::function<std::optional<std::string>(RunConfig&, const Value&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> echo;
};

struct Range {
  double lo = -INFINITY, hi = INFINITY;
  bool lo_open = false, hi_open = false;
  std::string describe() const {
    std::ostringstream os;
    os << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    return os.str();
  }
  bool contains(double v) const {
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
};

inline std::optional<std::string> check_range(const std::string& key, double v, const Range& r) {
  if (r.contains(v)) return std::nullopt;
  std::ostringstream os;
  os << key << " = " << v << " violates range " << r.describe();
  return os.str();
}

inline Field number(std::string key, std::function<double&(RunConfig&)> m, Range r = {}) {
  auto get = m;
  return {key,
          [key, m, r](RunConfig& c, const Value& v) -> std::optional<std::string> {
            const auto x = v.quoted ? std::nullopt : to_number(v.text);
            if (!x) return key + ": expected a number, got '" + v.text + "'";
            if (auto e = check_range(key, *x, r)) return e;
            m(c) = *x;
            return std::nullopt;
          },
          [get](const RunConfig& c) -> std::optional<std::string> {
            return fmt(get(const_cast<RunConfig&>(c)));
          }};
}

inline Field opt_number(std::string key, std::function<std::optional<double>&(RunConfig&)> m, Range r = {}) {
  return {key,
          [key, m, r](RunConfig& c, const Value& v) -> std::optional<std::string> {
            const auto x = v.quoted ? std::nullopt : to_number(v.text);
            if (!x) return key + ": expected a number, got '" + v.text + "'";
            if (auto e = check_range(key, *x, r)) return e;
            m(c) = *x;
            return std::nullopt;
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            const auto& o = m(const_cast<RunConfig&>(c));
            if (!o) return std::nullopt;
            return fmt(*o);
          }};
}

inline Field integer(std::string key, std::function<long&(RunConfig&)> m, Range r = {}) {
  return {key,
          [key, m, r](RunConfig& c, const Value& v) -> std::optional<std::string> {
            long x = 0;
            const auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), x);
            if (v.quoted || res.ec != std::errc() || res.ptr != v.text.data() + v.text.size()) {
              return key + ": expected an integer, got '" + v.text + "'";
            }
            if (auto e = check_range(key, static_cast<double>(x), r)) return e;
            m(c) = x;
            return std::nullopt;
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            return std::to_string(m(const_cast<RunConfig&>(c)));
          }};
}

inline Field boolean(std::string key, std::function<bool&(RunConfig&)> m) {
  return {key,
          [key, m](RunConfig& c, const Value& v) -> std::optional<std::string> {
            if (v.text == "true") m(c) = true;
            else if (v.text == "false") m(c) = false;
            else return key + ": expected true or false, got '" + v.text + "'";
            return std::nullopt;
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            return m(const_cast<RunConfig&>(c)) ? "true" : "false";
          }};
}

inline Field choice(std::string key, std::function<std::string&(RunConfig&)> m,
                    std::vector<std::string> allowed) {
  return {key,
          [key, m, allowed](RunConfig& c, const Value& v) -> std::optional<std::string> {
            for (const auto& a : allowed) {
              if (v.text == a) {
                m(c) = v.text;
                return std::nullopt;
              }
            }
            std::string msg = key + ": unknown value '" + v.text + "' (expected one of";
            for (const auto& a : allowed) msg += " " + a;
            return msg + ")";
          },
          [m](const RunConfig& c) -> std::optional<std::string> { return m(const_cast<RunConfig&>(c)); }};
}

inline Field text(std::string key, std::function<std::string&(RunConfig&)> m) {
  return {key,
          [m](RunConfig& c, const Value& v) -> std::optional<std::string> {
            m(c) = v.text;
            return std::nullopt;
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            const auto& s = m(const_cast<RunConfig&>(c));
            return quote(s);
          }};
}

inline Field number_list(std::string key, std::function<std::vector<double>&(RunConfig&)> m) {
  return {key,
          [key, m](RunConfig& c, const Value& v) -> std::optional<std::string> {
            std::vector<double> out;
            std::string_view s = v.text;
            while (!s.empty()) {
              const auto comma = s.find(',');
              std::string_view item = s.substr(0, comma);
              while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
              while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
              const auto x = to_number(item);
              if (!x) return key + ": expected a comma-separated number list, got '" + v.text + "'";
              out.push_back(*x);
              if (comma == std::string_view::npos) break;
              s.remove_prefix(comma + 1);
            }
            m(c) = out;
            return std::nullopt;
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            const auto& xs = m(const_cast<RunConfig&>(c));
            if (xs.empty()) return std::nullopt;
            std::string s;
            for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
            return s;
          }};
}

inline void profile_fields(std::vector<Field>& f, const std::string& prefix,
                           std::function<ProfileConfig&(RunConfig&)> m) {
  f.push_back(choice(prefix + ".kind", [m](RunConfig& c) -> std::string& { return m(c).kind; },
                     {"constant", "linear", "sinusoidal", "sin", "tanh", "tanh_step"}));
  f.push_back(opt_number(prefix + ".c0", [m](RunConfig& c) -> std::optional<double>& { return m(c).c0; }));
  f.push_back(number(prefix + ".amp", [m](RunConfig& c) -> double& { return m(c).amp; }));
  f.push_back(number(prefix + ".k", [m](RunConfig& c) -> double& { return m(c).k; }));
  f.push_back(number(prefix + ".phase", [m](RunConfig& c) -> double& { return m(c).phase; }));
  f.push_back(number(prefix + ".center", [m](RunConfig& c) -> double& { return m(c).center; }));
  f.push_back(number(prefix + ".width", [m](RunConfig& c) -> double& { return m(c).width; },
                     {0.0, INFINITY, true, false}));
}

inline const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    const Range positive{0.0, INFINITY, true, false};
    const Range gamma_range{1.0, INFINITY, true, false};
    std::vector<Field> f;
#define CB_M(path) [](RunConfig& c) -> auto& { return c.path; }
    f.push_back(choice("model.name", CB_M(model.name),
                       {"isentropic", "psystem", "gamma_entropy", "mhd", "tabulated"}));
    f.push_back(number("model.gamma", CB_M(model.gamma), gamma_range));
    f.push_back(number("model.K", CB_M(model.K), positive));
    f.push_back(number("model.cv", CB_M(model.cv), positive));
    profile_fields(f, "model.profile", CB_M(model.profile));
    f.push_back(text("model.table", CB_M(model.table)));
    f.push_back(opt_number("model.v_min", CB_M(model.v_min), positive));
    f.push_back(opt_number("model.v_max", CB_M(model.v_max), positive));
    f.push_back(opt_number("model.h0", CB_M(model.h0), {0.0, INFINITY}));
    f.push_back(integer("grid.n", CB_M(grid.n), {16, 1e8}));
    f.push_back(number("grid.x_lo", CB_M(grid.x_lo)));
    f.push_back(number("grid.x_hi", CB_M(grid.x_hi)));
    f.push_back(choice("grid.boundary", CB_M(grid.boundary), {"periodic", "outflow"}));
    f.push_back(number("run.cfl", CB_M(run.cfl), {0.0, 0.9, true, false}));
    f.push_back(number("run.t_max", CB_M(run.t_max), {0.0, INFINITY}));
    f.push_back(number("run.nu", CB_M(run.nu), {0.0, 1.0, true, true}));
    f.push_back(number("run.blowup_cut", CB_M(run.blowup_cut), positive));
    f.push_back(number("run.resolution_theta", CB_M(run.resolution_theta), {0.0, 1.0, true, false}));
    f.push_back(boolean("run.confirm_refinement", CB_M(run.confirm_refinement)));
    f.push_back(choice("initial.preset", CB_M(initial.preset), {"gaussian", "sine", "tanh_ramp", "constant"}));
    f.push_back(choice("initial.family", CB_M(initial.family), {"forward", "backward", "velocity", "volume"}));
    f.push_back(number("initial.amplitude", CB_M(initial.amplitude)));
    f.push_back(opt_number("initial.target_y0", CB_M(initial.target_y0)));
    f.push_back(number("initial.center", CB_M(initial.center)));
    f.push_back(number("initial.width", CB_M(initial.width), positive));
    f.push_back(number("initial.wavenumber", CB_M(initial.wavenumber)));
    f.push_back(opt_number("initial.pressure", CB_M(initial.pressure), positive));
    f.push_back(number_list("trace.seeds", CB_M(trace.seeds)));
    f.push_back(integer("trace.count", CB_M(trace.count), {1, 1e6}));
    f.push_back(choice("trace.family", CB_M(trace.family), {"forward", "backward", "both"}));
    f.push_back(number("duct.gamma", CB_M(duct.gamma), gamma_range));
    f.push_back(number("duct.K", CB_M(duct.K), positive));
    f.push_back(number("duct.cv", CB_M(duct.cv), positive));
    profile_fields(f, "duct.area", CB_M(duct.area));
    f.push_back(number("duct.v0", CB_M(duct.v0), positive));
    f.push_back(number("duct.amp", CB_M(duct.amp)));
    f.push_back(number("duct.u_amp", CB_M(duct.u_amp)));
    f.push_back(number("duct.center", CB_M(duct.center)));
    f.push_back(number("duct.width", CB_M(duct.width), positive));
    f.push_back(number("duct.X_lo", CB_M(duct.X_lo)));
    profile_fields(f, "duct.entropy", CB_M(duct.entropy));
    f.push_back(text("output.dir", CB_M(output.dir)));
    f.push_back(integer("output.snapshot_every", CB_M(output.snapshot_every), {0, 1e9}));
    f.push_back(integer("coords.cache_nodes", CB_M(coords.cache_nodes), {0, 1e9}));
    f.push_back(opt_number("threshold.h_lo", CB_M(threshold.h_lo), positive));
    f.push_back(opt_number("threshold.h_hi", CB_M(threshold.h_hi), positive));
    f.push_back(integer("threshold.nh", CB_M(threshold.nh), {1, 1e5}));
    f.push_back(integer("threshold.nmu", CB_M(threshold.nmu), {1, 1e5}));
    f.push_back(choice("verify.corrupt", CB_M(verify.corrupt), {"none", "flip_pvv"}));
    f.push_back(integer("verify.samples", CB_M(verify.samples), {1, 1e7}));
    f.push_back(integer("seed", CB_M(seed)));
#undef CB_M
    return f;
  }();
  return fields;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses and validates; throws ConfigError listing every problem found.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::vector<ConfigIssue> issues;
  std::map<std::string, int> seen;
  std::map<std::string, int> key_line;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    // Strip comments outside quotes.
    bool in_q = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_q = !in_q;
      if (!in_q && (raw[i] == '#' || raw[i] == ';')) {
        cut = i;
        break;
      }
    }
    std::string_view body = raw.substr(0, cut);
    const auto lead = body.find_first_not_of(" \t");
    if (lead == std::string_view::npos) continue;
    const int col0 = static_cast<int>(lead) + 1;
    body = detail::trim(body);
    if (body.front() == '[') {
      if (body.back() != ']') {
        issues.push_back({line_no, col0, "unterminated section header"});
        continue;
      }
      section = std::string(detail::trim(body.substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, col0, "expected key = value"});
      continue;
    }
    const std::string key_part(detail::trim(body.substr(0, eq)));
    if (key_part.empty()) {
      issues.push_back({line_no, col0, "missing key before '='"});
      continue;
    }
    const std::string key = section.empty() ? key_part : section + "." + key_part;
    const std::size_t vstart_rel = body.find_first_not_of(" \t", eq + 1);
    detail::Value v;
    v.line = line_no;
    v.col = vstart_rel == std::string_view::npos ? col0 + static_cast<int>(body.size())
                                                 : col0 + static_cast<int>(vstart_rel);
    std::string_view val = detail::trim(body.substr(eq + 1));
    if (!val.empty() && val.front() == '"') {
      if (val.size() < 2 || val.back() != '"') {
        issues.push_back({line_no, v.col, key + ": unterminated string"});
        continue;
      }
      v.quoted = true;
      val = val.substr(1, val.size() - 2);
    }
    v.text = std::string(val);
    const detail::Field* field = nullptr;
    for (const auto& f : detail::schema()) {
      if (f.key == key) field = &f;
    }
    if (!field) {
      issues.push_back({line_no, col0, "unknown key '" + key + "'"});
      continue;
    }
    if (seen.count(key)) {
      issues.push_back({line_no, col0, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(seen[key]) + ")"});
      continue;
    }
    seen[key] = line_no;
    if (auto err = field->set(cfg, v)) issues.push_back({line_no, v.col, *err});
  }
  auto line_of = [&](const std::string& k) { return seen.count(k) ? seen[k] : 0; };
  if (!(cfg.grid.x_hi > cfg.grid.x_lo)) {
    issues.push_back({line_of("grid.x_hi"), 1, "grid.x_hi must exceed grid.x_lo"});
  }
  if (cfg.model.v_min && cfg.model.v_max && !(*cfg.model.v_max > *cfg.model.v_min)) {
    issues.push_back({line_of("model.v_max"), 1, "model.v_max must exceed model.v_min"});
  }
  if (cfg.model.name == "tabulated" && cfg.model.table.empty()) {
    issues.push_back({line_of("model.name"), 1, "model.name = tabulated needs model.table"});
  }
  if (cfg.model.name == "mhd" && cfg.model.gamma != 2.0 && seen.count("model.gamma")) {
    issues.push_back({line_of("model.gamma"), 1, "model.gamma must be 2 for the mhd model"});
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  // Resolve model-dependent defaults so the echo is exact.
  if (cfg.model.name == "mhd") cfg.model.gamma = 2.0;
  if (!cfg.model.profile.c0) cfg.model.profile.c0 = cfg.model.name == "mhd" ? 1.0 : 0.0;
  if (!cfg.duct.area.c0) cfg.duct.area.c0 = 1.0;
  if (!cfg.duct.entropy.c0) cfg.duct.entropy.c0 = 0.0;
  return cfg;
}

/// Canonical text form; parse_config(echo(c)) == c for any resolved config.
/// Top-level keys come first, then one block per section in schema order.
inline std::string echo(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& f : detail::schema()) {
    if (f.key.find('.') != std::string::npos) continue;
    if (const auto val = f.echo(cfg)) os << f.key << " = " << *val << '\n';
  }
  std::string section;
  for (const auto& f : detail::schema()) {
    const auto dot = f.key.find('.');
    if (dot == std::string::npos) continue;
    const auto val = f.echo(cfg);
    if (!val) continue;
    const std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      os << (os.tellp() > 0 ? "\n" : "") << '[' << sec << "]\n";
      section = sec;
    }
    os << f.key.substr(dot + 1) << " = " << *val << '\n';
  }
  return os.str();
}

}  // namespace charblow::config
