#ifndef FELLER_CLI_HPP
#define FELLER_CLI_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "feller/config.hpp"
#include "feller/diffusion.hpp"
#include "feller/eigen.hpp"
#include "feller/errors.hpp"
#include "feller/feller_bc.hpp"
#include "feller/grid.hpp"
#include "feller/grid_oracle.hpp"
#include "feller/resolvent_minimal.hpp"
#include "feller/rng.hpp"
#include "feller/simulate.hpp"

namespace feller {
namespace cli_detail {

using json = nlohmann::ordered_json;

/// All numeric output is fixed at 12 significant digits so emitted files
/// diff reproducibly and re-ingest without loss at the declared precision.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline json jnum(double v) {
  if (!std::isfinite(v)) {
    if (v > 0.0) return "inf";
    if (v < 0.0) return "-inf";
    return "nan";
  }
  return std::stod(fmt12(v));
}

inline json jext(const ExtReal& e) { return e.finite ? jnum(e.value) : json("inf"); }

inline json jlimit(const BoundaryLimit& l) { return l.finite ? jnum(l.value) : json("inf"); }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::ConfigError, "cannot write '" + path + "'");
  out << text;
  if (!out) raise(Errc::ConfigError, "short write to '" + path + "'");
}

inline void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// column-major CSV with a header row
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<const std::vector<double>*>& cols) {
  std::string text;
  for (std::size_t c = 0; c < header.size(); ++c)
    text += (c ? "," : "") + header[c];
  text += "\n";
  std::size_t rows = cols.empty() ? 0 : cols[0]->size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      text += (c ? "," : "") + fmt12((*cols[c])[i]);
    text += "\n";
  }
  write_text(path, text);
}

/// Where a command's files land. `--out` (or task.out) may be a directory
/// or an explicit .csv/.json file path; companions swap the extension and
/// default names apply inside a directory.
struct OutTarget {
  std::string dir = ".";
  std::string stem;
  bool explicit_file = false;

  std::string file(const std::string& base, std::size_t idx, std::size_t count,
                   const char* ext) const {
    std::string name = explicit_file ? stem : base;
    if (count > 1) name += "_" + std::to_string(idx + 1);
    return dir + "/" + name + ext;
  }
};

inline OutTarget out_target(const std::string& flag_out, const std::string& task_out,
                            const char* default_stem) {
  OutTarget t;
  t.stem = default_stem;
  std::string pick = !flag_out.empty() ? flag_out : task_out;
  if (pick.empty()) return t;
  std::filesystem::path p(pick);
  std::string ext = p.extension().string();
  if (ext == ".csv" || ext == ".json") {
    t.explicit_file = true;
    t.stem = p.stem().string();
    t.dir = p.parent_path().empty() ? "." : p.parent_path().string();
  } else {
    t.dir = pick;
  }
  if (t.dir != ".") std::filesystem::create_directories(t.dir);
  return t;
}

inline double lerp_at(const std::vector<double>& xs, const std::vector<double>& ys, double xq) {
  std::size_t n = xs.size();
  if (xq <= xs.front()) return ys.front();
  if (xq >= xs.back()) return ys.back();
  std::size_t j =
      static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), xq) - xs.begin()) - 1;
  if (j + 1 >= n) j = n - 2;
  double w = (xq - xs[j]) / (xs[j + 1] - xs[j]);
  return ys[j] + w * (ys[j + 1] - ys[j]);
}

/// Command-line overrides; sentinels mean "not given" and leave the config
/// value in force.
struct Flags {
  std::string config, out;
  std::vector<double> r;
  std::uint64_t seed = static_cast<std::uint64_t>(-1);
  std::uint64_t paths = 0;
  std::uint64_t record = static_cast<std::uint64_t>(-1);
  std::size_t nodes = 0;
  double eps = std::numeric_limits<double>::quiet_NaN();
  double x0 = std::numeric_limits<double>::quiet_NaN();
  double horizon = std::numeric_limits<double>::quiet_NaN();
  bool minimal = false;
  std::string oracle;
  bool also_oracle = false;
  bool also_mc = false;
};

// flag-over-config merge
inline void apply_flags(RunConfig& rc, const Flags& fl) {
  if (!fl.r.empty()) rc.task.r = fl.r;
  for (double r : rc.task.r)
    if (!(r > 0.0)) raise(Errc::ConfigError, "rates must be positive");
  if (fl.seed != static_cast<std::uint64_t>(-1)) rc.task.seed = fl.seed;
  if (fl.paths != 0) rc.task.paths = fl.paths;
  if (fl.record != static_cast<std::uint64_t>(-1)) rc.task.record_paths = fl.record;
  if (fl.nodes != 0) {
    if (fl.nodes < 8) raise(Errc::ConfigError, "need at least 8 nodes");
    rc.task.nodes = fl.nodes;
  }
  if (!std::isnan(fl.eps)) rc.task.eps = fl.eps;
  if (!std::isnan(fl.x0)) rc.task.x0 = fl.x0;
  if (!std::isnan(fl.horizon)) rc.task.horizon = fl.horizon;
  if (!fl.out.empty()) rc.task.out = fl.out;
}

inline std::vector<double> need_rates(const RunConfig& rc) {
  if (rc.task.r.empty())
    raise(Errc::ConfigError, "no rates given (task.r in the config or --r on the command line)");
  return rc.task.r;
}

inline WorkGrid make_work_grid(const RunConfig& rc, const std::vector<double>& rates) {
  GridParams P;
  P.n = rc.task.nodes;
  double rmax = 2.0;
  for (double r : rates) rmax = std::max(rmax, r);
  P.r_ref = rmax;
  return build_grid(rc.spec, P);
}

inline double endpoint_g(const RunConfig& rc, bool lower) {
  double given = lower ? rc.task.g_a : rc.task.g_b;
  if (!std::isnan(given)) return given;
  return rc.task.g(lower ? rc.spec.a : rc.spec.b);
}

inline json validation_json(const ValidationReport& rep) {
  json out;
  out["ok"] = rep.ok;
  out["items"] = json::array();
  for (const ValidationItem& it : rep.items) {
    json row;
    row["name"] = it.name;
    row["pass"] = it.pass;
    row["value"] = jnum(it.value);
    if (!it.note.empty()) row["note"] = it.note;
    out["items"].push_back(row);
  }
  return out;
}

// boundary-data gate shared by the computing commands: structured report on
// stderr and exit 2 when the data is inadmissible
inline bool gate_validation(const RunConfig& rc, json& report_out) {
  ValidationReport rep = validate_report(rc.boundary, rc.spec);
  report_out = validation_json(rep);
  if (!rep.ok) {
    json err;
    err["error"]["code"] = "InvalidBoundaryData";
    std::string names;
    for (const ValidationItem& it : rep.items)
      if (!it.pass) names += (names.empty() ? "" : " ") + it.name;
    err["error"]["message"] = "boundary data rejected: " + names;
    err["error"]["validation"] = report_out;
    std::cerr << err.dump(2) << "\n";
  }
  return rep.ok;
}

inline int cmd_classify(const RunConfig& rc, const Flags& fl) {
  BoundaryClass ca = classify_boundary(rc.spec, Endpoint::Lower);
  BoundaryClass cb = classify_boundary(rc.spec, Endpoint::Upper);
  FellerIntegrals ia = feller_integrals(rc.spec, Endpoint::Lower);
  FellerIntegrals ib = feller_integrals(rc.spec, Endpoint::Upper);

  json out;
  out["a"] = kind_name(ca.kind);
  out["b"] = kind_name(cb.kind);
  auto detail = [&](const BoundaryClass& bc, const FellerIntegrals& fi) {
    json d;
    d["accessible"] = bc.accessible;
    d["enterable"] = bc.enterable;
    d["I_access"] = jext(fi.access);
    d["I_enter"] = jext(fi.enter);
    return d;
  };
  out["detail"]["a"] = detail(ca, ia);
  out["detail"]["b"] = detail(cb, ib);

  std::cout << out.dump(2) << "\n";
  if (!fl.out.empty() || !rc.task.out.empty()) {
    OutTarget t = out_target(fl.out, rc.task.out, "classify");
    write_json(t.file("classify", 0, 1, ".json"), out);
  }
  return 0;
}

inline int cmd_eigen(const RunConfig& rc, const Flags& fl) {
  std::vector<double> rates = need_rates(rc);
  WorkGrid G = make_work_grid(rc, rates);
  OutTarget t = out_target(fl.out, rc.task.out, "eigen");

  json out;
  out["results"] = json::array();
  for (std::size_t k = 0; k < rates.size(); ++k) {
    EigenSolution E = compute_eigen(G, rates[k]);
    std::string file = t.file("eigen", k, rates.size(), ".csv");
    write_csv(file, {"x", "u", "v", "Dsu", "Dsv"}, {&G.x, &E.u, &E.v, &E.du, &E.dv});
    json row;
    row["r"] = jnum(rates[k]);
    row["file"] = std::filesystem::path(file).filename().string();
    row["wronskian_residual"] = jnum(E.wronskian_residual);
    row["u_at_a"] = jlimit(E.u_a);
    row["u_at_b"] = jlimit(E.u_b);
    row["v_at_a"] = jlimit(E.v_a);
    row["v_at_b"] = jlimit(E.v_b);
    out["results"].push_back(row);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

inline int cmd_resolve(const RunConfig& rc, const Flags& fl) {
  std::vector<double> rates = need_rates(rc);
  OutTarget t = out_target(fl.out, rc.task.out, "resolve");

  json sidecar;
  sidecar["g"] = rc.task.g_text;
  if (!fl.minimal) {
    json vrep;
    if (!gate_validation(rc, vrep)) return 2;
    sidecar["validation"] = vrep;
  }
  sidecar["results"] = json::array();

  const bool oracle_primary = fl.oracle == "grid";
  if (!fl.oracle.empty() && !oracle_primary)
    raise(Errc::ConfigError, "unknown oracle '" + fl.oracle + "' (supported: grid)");
  if (fl.minimal && (oracle_primary || fl.also_oracle || fl.also_mc))
    raise(Errc::ConfigError, "--minimal computes the killed resolvent only");
  if (oracle_primary && (fl.also_oracle || fl.also_mc))
    raise(Errc::ConfigError, "--oracle grid is a primary solver; drop --also-*");

  WorkGrid G;
  std::vector<double> gvec;
  double g_a = 0.0, g_b = 0.0, gsup = 0.0;
  if (!oracle_primary) {
    G = make_work_grid(rc, rates);
    gvec.resize(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) {
      gvec[i] = rc.task.g(G.x[i]);
      gsup = std::max(gsup, std::fabs(gvec[i]));
    }
    g_a = endpoint_g(rc, true);
    g_b = endpoint_g(rc, false);
  }

  GridChain C;
  std::vector<double> g_or;
  const bool want_oracle = oracle_primary || fl.also_oracle;
  if (want_oracle) {
    C = discretize(rc.spec, rc.boundary, rc.task.nodes);
    g_or.resize(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) {
      g_or[i] = rc.task.g(C.x[i]);
      gsup = std::max(gsup, std::fabs(g_or[i]));
    }
    if (!std::isnan(rc.task.g_a)) g_or.front() = rc.task.g_a;
    if (!std::isnan(rc.task.g_b)) g_or.back() = rc.task.g_b;
  }

  double x0 = rc.task.x0;
  if ((fl.also_oracle || fl.also_mc) && std::isnan(x0)) x0 = rc.spec.c;

  bool all_pass = true;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    const double r = rates[k];
    json row;
    row["r"] = jnum(r);
    std::string file = t.file("resolve", k, rates.size(), ".csv");

    if (fl.minimal) {
      EigenSolution E = compute_eigen(G, r);
      R0Apply R0 = apply_r0(G, E, gvec);
      write_csv(file, {"x", "R0"}, {&G.x, &R0.values});
      row["file"] = std::filesystem::path(file).filename().string();
      double sup = 0.0;
      for (double v : R0.values) sup = std::max(sup, std::fabs(v));
      row["sup"] = jnum(sup);
      sidecar["results"].push_back(row);
      continue;
    }

    std::vector<double> oracle_f;
    if (want_oracle) oracle_f = solve_resolvent(C, g_or, r);

    if (oracle_primary) {
      write_csv(file, {"x", "R"}, {&C.x, &oracle_f});
      row["file"] = std::filesystem::path(file).filename().string();
      row["oracle"] = "grid";
      row["R_a"] = jnum(oracle_f.front());
      row["R_b"] = jnum(oracle_f.back());
      sidecar["results"].push_back(row);
      continue;
    }

    EigenSolution E = compute_eigen(G, r);
    ExtendedResolvent er = extended_resolvent(rc.boundary, G, E, gvec, g_a, g_b);

    std::vector<double> xs, Rs;
    xs.reserve(G.size() + 2);
    Rs.reserve(G.size() + 2);
    xs.push_back(rc.spec.a);
    Rs.push_back(er.at_a);
    for (std::size_t i = 0; i < G.size(); ++i) {
      xs.push_back(G.x[i]);
      Rs.push_back(er.values[i]);
    }
    xs.push_back(rc.spec.b);
    Rs.push_back(er.at_b);
    write_csv(file, {"x", "R"}, {&xs, &Rs});

    row["file"] = std::filesystem::path(file).filename().string();
    row["R_a"] = jnum(er.at_a);
    row["R_b"] = jnum(er.at_b);
    row["psi_a"] = jnum(er.psi_a);
    row["psi_b"] = jnum(er.psi_b);
    row["det"] = jnum(er.det);
    row["residual_a"] = jnum(er.residual_a);
    row["residual_b"] = jnum(er.residual_b);
    row["case"] = case_name(er.tag);
    row["row_a"] = er.row_a_is_phi ? "phi" : "continuity";
    row["row_b"] = er.row_b_is_phi ? "phi" : "continuity";

    if (fl.also_oracle || fl.also_mc) {
      json agree;
      agree["x0"] = jnum(x0);
      const double tol_det = std::max(1e-3 * gsup / r, 1e-12);
      agree["tol_deterministic"] = jnum(tol_det);
      const double v_an = x0 == rc.spec.a   ? er.at_a
                          : x0 == rc.spec.b ? er.at_b
                                            : G.interp(er.values, x0);
      agree["analytic"] = jnum(v_an);
      bool pass = true;
      if (fl.also_oracle) {
        double v_or = lerp_at(C.x, oracle_f, x0);
        agree["oracle"] = jnum(v_or);
        double sup_diff = 0.0;
        for (std::size_t i = 0; i < G.size(); ++i)
          sup_diff = std::max(sup_diff, std::fabs(lerp_at(C.x, oracle_f, G.x[i]) - er.values[i]));
        agree["sup_diff_analytic_oracle"] = jnum(sup_diff);
        bool ok = std::fabs(v_or - v_an) <= tol_det;
        agree["analytic_vs_oracle"] = ok;
        pass = pass && ok;
      }
      if (fl.also_mc) {
        ResolventEstimate est = mc_resolvent(rc.boundary, rc.spec, rc.task.g, r, x0,
                                             rc.task.paths, rc.task.eps, rc.task.seed);
        agree["mc"] = jnum(est.value);
        agree["mc_std_error"] = jnum(est.std_error);
        agree["mc_paths"] = est.n_paths;
        const double tol_mc = std::max(tol_det, 3.0 * est.std_error);
        agree["tol_mc"] = jnum(tol_mc);
        bool ok = std::fabs(est.value - v_an) <= tol_mc;
        agree["analytic_vs_mc"] = ok;
        pass = pass && ok;
        if (fl.also_oracle) {
          bool ok2 = std::fabs(est.value - agree["oracle"].get<double>()) <= tol_mc;
          agree["oracle_vs_mc"] = ok2;
          pass = pass && ok2;
        }
      }
      agree["pass"] = pass;
      all_pass = all_pass && pass;
      row["agreement"] = agree;
    }
    sidecar["results"].push_back(row);
  }

  if (fl.also_oracle || fl.also_mc) sidecar["pass"] = all_pass;
  write_json(t.file("resolve", 0, 1, ".json"), sidecar);
  std::cout << sidecar.dump(2) << "\n";
  return 0;
}

inline int cmd_simulate(const RunConfig& rc, const Flags& fl) {
  std::vector<double> rates = need_rates(rc);
  json vrep;
  if (!gate_validation(rc, vrep)) return 2;
  OutTarget t = out_target(fl.out, rc.task.out, "");

  double x0 = rc.task.x0;
  if (std::isnan(x0)) x0 = rc.spec.c;

  json out;
  out["x0"] = jnum(x0);
  out["eps"] = jnum(rc.task.eps);
  out["seed"] = rc.task.seed;
  out["paths"] = rc.task.paths;
  out["estimates"] = json::array();
  for (double r : rates) {
    ResolventEstimate est =
        mc_resolvent(rc.boundary, rc.spec, rc.task.g, r, x0, rc.task.paths, rc.task.eps,
                     rc.task.seed);
    json row;
    row["r"] = jnum(r);
    row["value"] = jnum(est.value);
    row["std_error"] = jnum(est.std_error);
    row["n_paths"] = est.n_paths;
    row["truncated"] = est.truncated;
    row["killed"] = est.killed;
    row["horizon"] = jnum(est.horizon);
    out["estimates"].push_back(row);
  }

  // demo paths: same per-path streams as the estimator, so with a matching
  // horizon row k is the exact path behind the estimator's k-th sample
  const std::uint64_t n_rec = std::min<std::uint64_t>(rc.task.record_paths, rc.task.paths);
  double horizon = rc.task.horizon;
  if (!(horizon > 0.0))
    horizon = std::log(100.0 * static_cast<double>(rc.task.paths)) / rates.front();
  std::string paths_file = t.file("paths", 0, 1, ".csv");
  std::string text = "path,t,x,tag\n";
  for (std::uint64_t k = 0; k < n_rec; ++k) {
    Rng rng = Rng::for_path(rc.task.seed, k);
    TaggedPath tp = assemble_path_tagged(rc.boundary, rc.spec, horizon, rc.task.eps, rng, x0);
    for (std::size_t i = 0; i < tp.path.times.size(); ++i) {
      text += std::to_string(k) + "," + fmt12(tp.path.times[i]) + "," +
              fmt12(tp.path.states[i]) + "," + tp.tags[i] + "\n";
    }
  }
  if (n_rec > 0) write_text(paths_file, text);

  out["recorded_paths"] = n_rec;
  out["horizon_recorded"] = jnum(horizon);
  if (n_rec > 0) out["paths_csv"] = std::filesystem::path(paths_file).filename().string();
  std::string est_file = t.explicit_file ? t.file("", 0, 1, ".json")
                                         : t.dir + "/estimates.json";
  write_json(est_file, out);
  std::cout << out.dump(2) << "\n";
  return 0;
}

inline int cmd_check_domain(const RunConfig& rc, const Flags& fl) {
  std::vector<double> rates = need_rates(rc);
  json vrep;
  if (!gate_validation(rc, vrep)) return 2;
  WorkGrid G = make_work_grid(rc, rates);

  std::vector<double> gvec(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) gvec[i] = rc.task.g(G.x[i]);
  double g_a = endpoint_g(rc, true), g_b = endpoint_g(rc, false);

  json out;
  out["results"] = json::array();
  bool all_ok = true;
  for (double r : rates) {
    EigenSolution E = compute_eigen(G, r);
    ExtendedResolvent er = extended_resolvent(rc.boundary, G, E, gvec, g_a, g_b);
    DomainCheckInput in;
    in.f = er.values;
    in.lf.resize(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) in.lf[i] = r * er.values[i] - gvec[i];
    in.f_a = er.at_a;
    in.f_b = er.at_b;
    in.lf_a = r * er.at_a - g_a;
    in.lf_b = r * er.at_b - g_b;
    DomainReport rep = generator_domain_check(rc.boundary, G, E, in);
    json row;
    row["r"] = jnum(r);
    row["verdict"] = rep.verdict;
    row["items"] = json::array();
    for (const DomainCheckItem& it : rep.items) {
      json itj;
      itj["name"] = it.name;
      itj["pass"] = it.pass;
      itj["residual"] = jnum(it.residual);
      row["items"].push_back(itj);
    }
    all_ok = all_ok && rep.verdict;
    out["results"].push_back(row);
  }
  out["verdict"] = all_ok;

  std::cout << out.dump(2) << "\n";
  if (!fl.out.empty() || !rc.task.out.empty()) {
    OutTarget t = out_target(fl.out, rc.task.out, "check_domain");
    write_json(t.file("check_domain", 0, 1, ".json"), out);
  }
  return all_ok ? 0 : 2;
}

inline int cmd_validate(const RunConfig& rc, const Flags& fl) {
  ValidationReport rep = validate_report(rc.boundary, rc.spec);
  json out = validation_json(rep);
  std::cout << out.dump(2) << "\n";
  if (!fl.out.empty() || !rc.task.out.empty()) {
    OutTarget t = out_target(fl.out, rc.task.out, "validate");
    write_json(t.file("validate", 0, 1, ".json"), out);
  }
  if (!rep.ok) {
    std::string names;
    for (const ValidationItem& it : rep.items)
      if (!it.pass) names += (names.empty() ? "" : " ") + it.name;
    std::cerr << "failed: " << names << "\n";
    return 2;
  }
  return 0;
}

}  // namespace cli_detail

/// Entry point behind the `feller` binary; also callable in-process. Exit 0
/// on success, 2 when validation or a domain check rejects, 1 on any other
/// structured error (report on stderr as JSON).
inline int run(int argc, const char* const* argv) {
  using cli_detail::Flags;
  namespace cd = cli_detail;

  CLI::App app{"boundary conditions, resolvents and sample paths of one-dimensional diffusions"};
  app.require_subcommand(1);
  Flags fl;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", fl.config, "run configuration (JSON)")->required();
    c->add_option("--out", fl.out, "output directory, or an explicit .csv/.json path");
    c->add_option("--r", fl.r, "rate values")->delimiter(',');
    c->add_option("--seed", fl.seed, "stream seed");
    c->add_option("--paths", fl.paths, "Monte Carlo path count");
    c->add_option("--eps", fl.eps, "boundary truncation scale");
    c->add_option("--nodes", fl.nodes, "grid node count");
    c->add_option("--x0", fl.x0, "evaluation point");
  };

  CLI::App* c_classify = app.add_subcommand("classify", "boundary classification report");
  add_common(c_classify);
  CLI::App* c_eigen = app.add_subcommand("eigen", "monotone eigenfunction tables");
  add_common(c_eigen);
  CLI::App* c_resolve = app.add_subcommand("resolve", "resolvent of the extended process");
  add_common(c_resolve);
  c_resolve->add_flag("--minimal", fl.minimal, "killed (minimal) resolvent only");
  c_resolve->add_option("--oracle", fl.oracle, "use a matrix oracle as the primary solver");
  c_resolve->add_flag("--also-oracle", fl.also_oracle, "cross-check against the grid oracle");
  c_resolve->add_flag("--also-mc", fl.also_mc, "cross-check against the path estimator");
  CLI::App* c_sim = app.add_subcommand("simulate", "sample paths and Monte Carlo estimates");
  add_common(c_sim);
  c_sim->add_option("--horizon", fl.horizon, "recorded-path horizon");
  c_sim->add_option("--record", fl.record, "number of paths written to the CSV");
  CLI::App* c_dom = app.add_subcommand("check-domain", "generator domain membership of R g");
  add_common(c_dom);
  CLI::App* c_val = app.add_subcommand("validate", "boundary-data admissibility report");
  add_common(c_val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig rc = load_config(fl.config);
    cd::apply_flags(rc, fl);
    if (app.got_subcommand(c_classify)) return cd::cmd_classify(rc, fl);
    if (app.got_subcommand(c_eigen)) return cd::cmd_eigen(rc, fl);
    if (app.got_subcommand(c_resolve)) return cd::cmd_resolve(rc, fl);
    if (app.got_subcommand(c_sim)) return cd::cmd_simulate(rc, fl);
    if (app.got_subcommand(c_dom)) return cd::cmd_check_domain(rc, fl);
    if (app.got_subcommand(c_val)) return cd::cmd_validate(rc, fl);
    return 1;
  } catch (const Error& e) {
    cd::json err;
    err["error"]["code"] = errc_name(e.code());
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    cd::json err;
    err["error"]["code"] = "Internal";
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
}

}  // namespace feller

#endif
