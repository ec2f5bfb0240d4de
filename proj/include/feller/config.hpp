#ifndef FELLER_CONFIG_HPP
#define FELLER_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "feller/boundary_data.hpp"
#include "feller/diffusion.hpp"
#include "feller/errors.hpp"
#include "feller/expr.hpp"
#include "feller/scalar_fn.hpp"

namespace feller {

/// Task block of a run config: what to compute and where to put it. NaN and
/// zero mark "not set"; each command fills its own defaults.
struct TaskBlock {
  std::string command;
  std::vector<double> r;
  std::string g_text = "1";
  ScalarFn g = ScalarFn::constant(1.0);
  double g_a = std::numeric_limits<double>::quiet_NaN();
  double g_b = std::numeric_limits<double>::quiet_NaN();
  double x0 = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t paths = 10000;
  std::uint64_t seed = 1;
  std::size_t nodes = 2001;
  double eps = 0.0;      // 0: default (interval length)/64
  double horizon = 0.0;  // 0: from the path count and rate
  std::uint64_t record_paths = 4;
  std::string out;
};

struct RunConfig {
  DiffusionSpec spec;
  FellerBoundaryData boundary;
  TaskBlock task;
  std::string path;  // config file, for error anchoring
};

namespace cfg_detail {

using json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& where, const std::string& msg) {
  raise(Errc::ConfigError, where + ": " + msg);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::ConfigError, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// byte offset -> "line L column C" for parse-error anchoring
inline std::string line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + " column " + std::to_string(col);
}

inline json parse_json(const std::string& path) {
  std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(path + " (" + line_of(text, e.byte > 0 ? e.byte - 1 : 0) + ")", e.what());
  }
}

inline const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double num_at(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline double get_num(const json& j, const char* key, const std::string& ctx, double dflt) {
  const json* v = find(j, key);
  return v ? num_at(*v, ctx + "." + key) : dflt;
}

inline std::string get_str(const json& j, const char* key, const std::string& ctx,
                           const std::string& dflt) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_string()) fail(ctx + "." + key, "expected a string");
  return v->get<std::string>();
}

inline bool get_bool(const json& j, const char* key, const std::string& ctx, bool dflt) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_boolean()) fail(ctx + "." + key, "expected a boolean");
  return v->get<bool>();
}

inline ScalarFn expr_fn(const std::string& text, const std::string& where) {
  try {
    Expr e = Expr::parse(text);
    return ScalarFn::from_function([e](double x) { return e(x); });
  } catch (const Error& err) {
    fail(where, err.what());
  }
}

/// Two-column CSV (x, value); an optional header line is skipped. Paths are
/// resolved relative to the config file's directory.
inline ScalarFn table_fn(const std::string& path, const std::string& cfg_path,
                         const std::string& where, bool require_increasing) {
  std::string full = path;
  if (!path.empty() && path[0] != '/') {
    std::size_t slash = cfg_path.find_last_of('/');
    if (slash != std::string::npos) full = cfg_path.substr(0, slash + 1) + path;
  }
  std::ifstream in(full);
  if (!in) fail(where, "cannot open table '" + full + "'");
  std::vector<double> xs, ys;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y;
    if (!(row >> x >> y)) {
      if (lineno == 1) continue;  // header row
      fail(where, full + " line " + std::to_string(lineno) + ": expected two numeric columns");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.size() < 2) fail(where, full + ": need at least two data rows");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i + 1] > xs[i]))
      fail(where, full + ": first column not strictly increasing at row " + std::to_string(i + 2));
    if (require_increasing && !(ys[i + 1] > ys[i]))
      fail(where, full + ": second column not strictly increasing at row " + std::to_string(i + 2));
  }
  return ScalarFn::from_table(std::move(xs), std::move(ys));
}

// one of <name> (expression) / <name>_table (CSV path) for a handle function
inline ScalarFn handle_fn(const json& spec, const char* name, const std::string& cfg_path,
                          bool require_increasing) {
  std::string ctx = std::string("spec.") + name;
  const json* ex = find(spec, name);
  const json* tb = find(spec, (std::string(name) + "_table").c_str());
  if (ex && tb) fail(ctx, "give either an expression or a table, not both");
  if (ex) {
    if (!ex->is_string()) fail(ctx, "expected an expression string");
    return expr_fn(ex->get<std::string>(), ctx);
  }
  if (tb) {
    if (!tb->is_string()) fail(ctx + "_table", "expected a file path");
    return table_fn(tb->get<std::string>(), cfg_path, ctx + "_table", require_increasing);
  }
  fail(ctx, "missing (expression string or *_table path)");
}

inline DiffusionSpec parse_spec(const json& root, const std::string& cfg_path) {
  const json* sp = find(root, "spec");
  if (!sp || !sp->is_object()) fail(cfg_path, "missing 'spec' object");
  const json* iv = find(*sp, "interval");
  if (!iv || !iv->is_array() || iv->size() != 2)
    fail("spec.interval", "expected [a, b]");
  DiffusionSpec d;
  d.a = num_at((*iv)[0], "spec.interval[0]");
  d.b = num_at((*iv)[1], "spec.interval[1]");
  if (!(d.a < d.b)) fail("spec.interval", "need a < b");
  d.c = get_num(*sp, "c", "spec", 0.5 * (d.a + d.b));
  if (!(d.c > d.a && d.c < d.b)) fail("spec.c", "reference point must be interior");

  const json* sde = find(*sp, "sde");
  if (sde) {
    if (find(*sp, "s") || find(*sp, "m") || find(*sp, "s_table") || find(*sp, "m_table"))
      fail("spec.sde", "give either (s, m) or an sde block, not both");
    if (!sde->is_object()) fail("spec.sde", "expected an object");
    ScalarFn mu = expr_fn(get_str(*sde, "mu", "spec.sde", ""), "spec.sde.mu");
    ScalarFn sg = expr_fn(get_str(*sde, "sigma", "spec.sde", ""), "spec.sde.sigma");
    DiffusionSpec out = from_sde(d.a, d.b, d.c, mu, sg);
    return out;
  }

  d.s = handle_fn(*sp, "s", cfg_path, true);
  d.m = handle_fn(*sp, "m", cfg_path, false);
  // normalize to s(c) = m(c) = 0; downstream quantities are invariant under
  // the allowed affine changes, this just fixes the representative
  double s0 = d.s(d.c), m0 = d.m(d.c);
  if (!std::isfinite(s0)) fail("spec.s", "not finite at the reference point");
  if (!std::isfinite(m0)) fail("spec.m", "not finite at the reference point");
  ScalarFn s_raw = d.s, m_raw = d.m;
  d.s = ScalarFn::from_function([s_raw, s0](double x) { return s_raw(x) - s0; });
  d.m = ScalarFn::from_function([m_raw, m0](double x) { return m_raw(x) - m0; });
  return d;
}

inline BoundaryMeasure parse_measure(const json& j, const std::string& ctx,
                                     const std::string& cfg_path) {
  BoundaryMeasure mu;
  if (const json* at = find(j, "atoms")) {
    if (!at->is_array()) fail(ctx + ".atoms", "expected an array of [x, w] pairs");
    for (std::size_t i = 0; i < at->size(); ++i) {
      const json& row = (*at)[i];
      std::string where = ctx + ".atoms[" + std::to_string(i) + "]";
      if (!row.is_array() || row.size() != 2) fail(where, "expected [x, w]");
      mu.atoms.push_back({num_at(row[0], where), num_at(row[1], where)});
    }
  }
  if (const json* de = find(j, "density")) {
    if (!de->is_string()) fail(ctx + ".density", "expected an expression string");
    mu.density = expr_fn(de->get<std::string>(), ctx + ".density");
    const json* sup = find(j, "support");
    if (!sup || !sup->is_array() || sup->size() != 2)
      fail(ctx + ".support", "a density needs a [lo, hi] support");
    mu.support_lo = num_at((*sup)[0], ctx + ".support[0]");
    mu.support_hi = num_at((*sup)[1], ctx + ".support[1]");
    mu.has_density = true;
  } else if (find(j, "support")) {
    fail(ctx + ".support", "support without a density");
  }
  mu.endpoint_atom = get_num(j, "endpoint_atom", ctx, 0.0);
  mu.declared_infinite = get_bool(j, "infinite", ctx, false);
  (void)cfg_path;
  return mu;
}

inline void parse_triple(const json& b, const char* key, const std::string& ctx, double& c1,
                         double& c2, double& c3) {
  const json* v = find(b, key);
  if (!v) return;
  if (!v->is_array() || v->size() != 3)
    fail(ctx + "." + key, "expected [killing, reflection, stagnancy]");
  c1 = num_at((*v)[0], ctx + "." + key + "[0]");
  c2 = num_at((*v)[1], ctx + "." + key + "[1]");
  c3 = num_at((*v)[2], ctx + "." + key + "[2]");
}

inline CaseTag parse_case(const json& b) {
  const json* v = find(b, "case");
  if (!v) return CaseTag::Auto;
  std::string t;
  if (v->is_number_integer()) t = std::to_string(v->get<int>());
  else if (v->is_string()) t = v->get<std::string>();
  else fail("boundary.case", "expected 1..4 or \"auto\"");
  if (t == "auto") return CaseTag::Auto;
  if (t == "1") return CaseTag::One;
  if (t == "2") return CaseTag::Two;
  if (t == "3") return CaseTag::Three;
  if (t == "4") return CaseTag::Four;
  fail("boundary.case", "expected 1..4 or \"auto\", got '" + t + "'");
}

inline FellerBoundaryData parse_boundary(const json& root, const std::string& cfg_path,
                                         double& eps_out) {
  FellerBoundaryData D;
  const json* b = find(root, "boundary");
  if (!b) return D;  // minimal diffusion: all rates zero
  if (!b->is_object()) fail(cfg_path, "'boundary' must be an object");
  parse_triple(*b, "p", "boundary", D.p1, D.p2, D.p3);
  parse_triple(*b, "q", "boundary", D.q1, D.q2, D.q3);
  if (const json* m4 = find(*b, "p4")) {
    if (!m4->is_object()) fail("boundary.p4", "expected an object");
    D.p4 = parse_measure(*m4, "boundary.p4", cfg_path);
  }
  if (const json* m4 = find(*b, "q4")) {
    if (!m4->is_object()) fail("boundary.q4", "expected an object");
    D.q4 = parse_measure(*m4, "boundary.q4", cfg_path);
  }
  D.a_irregular = get_bool(*b, "a_irregular", "boundary", false);
  D.b_irregular = get_bool(*b, "b_irregular", "boundary", false);
  D.case_tag = parse_case(*b);
  eps_out = get_num(*b, "eps", "boundary", eps_out);
  return D;
}

inline TaskBlock parse_task(const json& root, const DiffusionSpec& spec) {
  TaskBlock t;
  const json* tk = find(root, "task");
  if (!tk) return t;
  if (!tk->is_object()) fail("task", "expected an object");
  t.command = get_str(*tk, "command", "task", "");
  if (const json* rv = find(*tk, "r")) {
    if (rv->is_number()) {
      t.r.push_back(rv->get<double>());
    } else if (rv->is_array()) {
      for (std::size_t i = 0; i < rv->size(); ++i)
        t.r.push_back(num_at((*rv)[i], "task.r[" + std::to_string(i) + "]"));
    } else {
      fail("task.r", "expected a number or an array of numbers");
    }
    for (double r : t.r)
      if (!(r > 0.0)) fail("task.r", "rates must be positive");
  }
  t.g_text = get_str(*tk, "g", "task", "1");
  t.g = expr_fn(t.g_text, "task.g");
  t.g_a = get_num(*tk, "g_a", "task", std::numeric_limits<double>::quiet_NaN());
  t.g_b = get_num(*tk, "g_b", "task", std::numeric_limits<double>::quiet_NaN());
  t.x0 = get_num(*tk, "x0", "task", std::numeric_limits<double>::quiet_NaN());
  double paths = get_num(*tk, "paths", "task", 10000.0);
  if (!(paths >= 1.0)) fail("task.paths", "need at least one path");
  t.paths = static_cast<std::uint64_t>(paths);
  t.seed = static_cast<std::uint64_t>(get_num(*tk, "seed", "task", 1.0));
  double nodes = get_num(*tk, "nodes", "task", 2001.0);
  if (!(nodes >= 8.0)) fail("task.nodes", "need at least 8 nodes");
  t.nodes = static_cast<std::size_t>(nodes);
  t.eps = get_num(*tk, "eps", "task", 0.0);
  t.horizon = get_num(*tk, "horizon", "task", 0.0);
  double rec = get_num(*tk, "record_paths", "task", 4.0);
  if (!(rec >= 0.0)) fail("task.record_paths", "must be non-negative");
  t.record_paths = static_cast<std::uint64_t>(rec);
  t.out = get_str(*tk, "out", "task", "");
  (void)spec;
  return t;
}

}  // namespace cfg_detail

/// Load and validate a run config. Structural problems raise ConfigError
/// anchored to the file (parse errors carry line and column); semantic
/// problems in the diffusion handles raise InvalidSpec downstream.
inline RunConfig load_config(const std::string& path) {
  cfg_detail::json root = cfg_detail::parse_json(path);
  if (!root.is_object()) cfg_detail::fail(path, "top level must be an object");
  RunConfig rc;
  rc.path = path;
  rc.spec = cfg_detail::parse_spec(root, path);
  double eps = 0.0;
  rc.boundary = cfg_detail::parse_boundary(root, path, eps);
  rc.task = cfg_detail::parse_task(root, rc.spec);
  if (rc.task.eps == 0.0) rc.task.eps = eps;
  if (rc.task.eps == 0.0) rc.task.eps = (rc.spec.b - rc.spec.a) / 64.0;
  return rc;
}

}  // namespace feller

#endif
