// fracflow: simulator and verification suite for nonlocal mean curvature
// flow of periodic graphs. Subcommands: curvature, symbol, simulate, verify.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/config.hpp"
#include "fracflow/curvature.hpp"
#include "fracflow/flow.hpp"
#include "fracflow/grid.hpp"
#include "fracflow/io.hpp"
#include "fracflow/parallel.hpp"
#include "fracflow/symbols.hpp"
#include "fracflow/verify.hpp"

namespace {

using namespace fracflow;

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

int parse_int_token(std::string_view s) {
  s = trim(s);
  const double v = parse_double(s);
  const int k = int(std::lround(v));
  if (double(k) != v) {
    throw std::invalid_argument("expected an integer, got '" + std::string(s) +
                                "'");
  }
  return k;
}

/// "k1[,k2]:amplitude" entries joined by ';', e.g. "1:0.05;0:0.5" (dim 1)
/// or "1,0:0.05;2,2:0.01" (dim 2). Builds u(x) = sum amp * cos(k . x).
PeriodicField modes_field(const GridSpec& g, const std::string& spec) {
  struct Mode {
    Eigen::Vector2i k;
    double amp;
  };
  std::vector<Mode> modes;
  std::stringstream ss(spec);
  std::string entry;
  while (std::getline(ss, entry, ';')) {
    const auto body = trim(entry);
    if (body.empty()) continue;
    const auto colon = body.rfind(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("mode entry must be k:amplitude, got '" +
                                  std::string(body) + "'");
    }
    Mode mode{Eigen::Vector2i::Zero(), parse_double(body.substr(colon + 1))};
    const auto kpart = body.substr(0, colon);
    const auto comma = kpart.find(',');
    if (g.dim == 1) {
      if (comma != std::string_view::npos) {
        throw std::invalid_argument("scalar mode expected in dimension 1");
      }
      mode.k[0] = parse_int_token(kpart);
    } else {
      if (comma == std::string_view::npos) {
        throw std::invalid_argument("mode k1,k2 expected in dimension 2");
      }
      mode.k[0] = parse_int_token(kpart.substr(0, comma));
      mode.k[1] = parse_int_token(kpart.substr(comma + 1));
    }
    modes.push_back(mode);
  }
  if (modes.empty()) throw std::invalid_argument("empty mode list");
  PeriodicField u{g, Array::Zero(g.size())};
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Vec2 x = g.node(i);
    for (const auto& mode : modes) {
      u.values[i] +=
          mode.amp * std::cos(mode.k[0] * x[0] + mode.k[1] * x[1]);
    }
  }
  return u;
}

Vec2 parse_slope(const std::string& spec, int dim) {
  Vec2 a = Vec2::Zero();
  const auto body = trim(spec);
  const auto comma = body.find(',');
  if (comma == std::string_view::npos) {
    a[0] = parse_double(body);
  } else {
    if (dim == 1) {
      throw std::invalid_argument("scalar slope expected in dimension 1");
    }
    a[0] = parse_double(body.substr(0, comma));
    a[1] = parse_double(body.substr(comma + 1));
  }
  return a;
}

std::string shell_join(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    const std::string tok = argv[i];
    if (tok.find_first_of(" \t'\"") != std::string::npos) {
      out += '\'' + tok + '\'';
    } else {
      out += tok;
    }
  }
  return out;
}

/// Every output directory gets a config.resolved that reproduces the run:
/// the resolved key = value block plus the invoking command as a comment.
void emit_resolved(const RunConfig& cfg, const std::string& command) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "config.resolved";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# command: " << command << "\n" << cfg.resolved_text();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// ---------------------------------------------------------------------------
// Option bags (CLI11 writes into these; handlers consume them).

struct CommonOpts {
  std::string config_path;
  std::optional<double> alpha;
  std::optional<int> dim;
  std::optional<int> grid_m;
  std::optional<int> cells;
  std::optional<int> inner_nodes;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path,
                  "flat key = value configuration file (flags override it)");
  sub->add_option("--alpha", o.alpha, "operator order in (0,1)");
  sub->add_option("--dim", o.dim, "ambient dimension (1 or 2)")
      ->check(CLI::Range(1, 2));
  sub->add_option("--grid", o.grid_m, "grid points per axis (even, >= 8)");
  sub->add_option("--cells", o.cells, "explicit lattice-cell shells M");
  sub->add_option("--inner-nodes", o.inner_nodes,
                  "radial nodes of the graded singular patch");
  sub->add_option("--seed", o.seed, "seed for all randomized fixtures");
  sub->add_option("--threads", o.threads,
                  "worker threads (default: FRACFLOW_THREADS or hardware)");
  sub->add_option("--out-dir", o.out_dir, "output directory");
}

/// Order matters: dim resets the scheme defaults, so it is applied first.
RunConfig resolve_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = parse_config_file(o.config_path);
  if (o.dim) apply_config_override(cfg, "dim", std::to_string(*o.dim));
  if (o.alpha) apply_config_override(cfg, "alpha", format_double(*o.alpha));
  if (o.grid_m) apply_config_override(cfg, "grid_m", std::to_string(*o.grid_m));
  if (o.cells) {
    apply_config_override(cfg, "lattice_cells", std::to_string(*o.cells));
  }
  if (o.inner_nodes) {
    apply_config_override(cfg, "inner_radial_nodes",
                          std::to_string(*o.inner_nodes));
  }
  if (o.seed) apply_config_override(cfg, "seed", std::to_string(*o.seed));
  if (o.threads) {
    apply_config_override(cfg, "threads", std::to_string(*o.threads));
  }
  if (!o.out_dir.empty()) apply_config_override(cfg, "out_dir", o.out_dir);
  cfg.scheme.validate(cfg.params.dim);
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  return cfg;
}

// ---------------------------------------------------------------------------
// curvature

struct CurvatureOpts {
  CommonOpts common;
  std::string modes;
  std::string field_path;
  std::string form = "nmc";
};

int run_curvature(const CurvatureOpts& o, const std::string& command) {
  RunConfig cfg = resolve_config(o.common);
  PeriodicField u;
  if (!o.field_path.empty()) {
    auto snap = read_snapshot(o.field_path);
    if (snap.field.grid.dim != cfg.params.dim) {
      throw std::invalid_argument("snapshot dimension mismatch");
    }
    u = std::move(snap.field);
    cfg.grid = u.grid;
  } else if (!o.modes.empty()) {
    u = modes_field(cfg.grid, o.modes);
  } else {
    throw std::invalid_argument("curvature needs --modes or --field");
  }
  const bool want_nmc = o.form == "nmc" || o.form == "both";
  const bool want_pv = o.form == "pv" || o.form == "both";
  if (!want_nmc && !want_pv) {
    throw std::invalid_argument("--form must be nmc, pv, or both");
  }
  std::optional<CurvatureField> nmc, pv;
  double bound = 0.0;
  if (want_nmc) {
    nmc = h_alpha_field(u, cfg.params, cfg.scheme,
                        CurvatureForm::gradient_corrected);
    bound = std::max(bound, nmc->tail_bound);
  }
  if (want_pv) {
    pv = h_alpha_field(u, cfg.params, cfg.scheme,
                       CurvatureForm::principal_value);
    bound = std::max(bound, pv->tail_bound);
  }

  emit_resolved(cfg, command);
  const auto path = cfg.out_dir / "curvature.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "x1";
  if (cfg.grid.dim == 2) out << ",x2";
  if (want_nmc) out << ",nmc";
  if (want_pv) out << ",pv";
  out << ",tail_bound\n";
  for (Eigen::Index i = 0; i < cfg.grid.size(); ++i) {
    const Vec2 x = cfg.grid.node(i);
    out << format_double(x[0]);
    if (cfg.grid.dim == 2) out << ',' << format_double(x[1]);
    if (want_nmc) out << ',' << format_double(nmc->values.values[i]);
    if (want_pv) out << ',' << format_double(pv->values.values[i]);
    out << ',' << format_double(bound) << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << "curvature: wrote " << path.string() << " ("
            << cfg.grid.size() << " nodes, tail_bound "
            << format_double(bound) << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// symbol

struct SymbolOpts {
  CommonOpts common;
  std::string slope = "0";
  int kmax = 8;
  std::string method = "both";
  bool mikhlin = false;
};

int run_symbol(const SymbolOpts& o, const std::string& command) {
  RunConfig cfg = resolve_config(o.common);
  const Vec2 a = parse_slope(o.slope, cfg.params.dim);
  const bool want_direct = o.method == "direct" || o.method == "both";
  const bool want_polar = o.method == "polar" || o.method == "both";
  if (!want_direct && !want_polar) {
    throw std::invalid_argument("--method must be direct, polar, or both");
  }
  if (o.kmax < 1) throw std::invalid_argument("--kmax must be >= 1");

  // Half band (the symbol is even in k): k = 1..kmax in dim 1; k1 > 0 plus
  // the k1 = 0, k2 > 0 ray in dim 2.
  std::vector<Eigen::Vector2i> band;
  if (cfg.params.dim == 1) {
    for (int k = 1; k <= o.kmax; ++k) band.push_back({k, 0});
  } else {
    for (int k1 = 0; k1 <= o.kmax; ++k1) {
      for (int k2 = (k1 == 0 ? 1 : -o.kmax); k2 <= o.kmax; ++k2) {
        band.push_back({k1, k2});
      }
    }
  }

  emit_resolved(cfg, command);
  const auto path = cfg.out_dir / "symbol.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "k1";
  if (cfg.params.dim == 2) out << ",k2";
  if (want_direct) out << ",m_direct,p_direct";
  if (want_polar) out << ",m_polar,p_polar";
  out << "\n";
  for (const auto& k : band) {
    const Vec2 x{double(k[0]), double(k[1])};
    const double r = x.norm();
    out << k[0];
    if (cfg.params.dim == 2) out << ',' << k[1];
    if (want_direct) {
      const double m = symbol_direct(k, a, cfg.params, cfg.scheme);
      out << ',' << format_double(m) << ','
          << format_double(m / std::pow(r, 1.0 + cfg.params.alpha));
    }
    if (want_polar) {
      const double m = symbol_polar(x, a, cfg.params);
      out << ',' << format_double(m) << ','
          << format_double(symbol_profile(x, a, cfg.params));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << "symbol: wrote " << path.string() << " (" << band.size()
            << " modes)\n";

  if (o.mikhlin) {
    const MikhlinReport rep = mikhlin_sup(a, cfg.params);
    const auto jpath = cfg.out_dir / "mikhlin.json";
    std::ofstream js(jpath);
    if (!js) throw std::runtime_error("cannot write " + jpath.string());
    js << "{\n  \"inf_abs_profile\": " << format_double(rep.inf_abs_profile)
       << ",\n  \"derivative_sups\": [";
    for (std::size_t i = 0; i < rep.derivative_sups.size(); ++i) {
      js << (i ? ", " : "") << format_double(rep.derivative_sups[i]);
    }
    js << "],\n  \"m_emp\": " << format_double(rep.m_emp) << "\n}\n";
    if (!js) throw std::runtime_error("cannot write " + jpath.string());
    std::cout << "symbol: wrote " << jpath.string() << " (M_emp "
              << format_double(rep.m_emp) << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  CommonOpts common;
  std::string u0 = "1:0.05;0:0.5";
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string scheme;
  std::optional<double> sigma;
  std::optional<int> snapshot_every;
};

int run_simulate(const SimulateOpts& o, const std::string& command) {
  RunConfig cfg = resolve_config(o.common);
  if (o.dt) apply_config_override(cfg, "dt", format_double(*o.dt));
  if (o.t_end) apply_config_override(cfg, "t_end", format_double(*o.t_end));
  if (!o.scheme.empty()) apply_config_override(cfg, "scheme", o.scheme);
  if (o.sigma) {
    apply_config_override(cfg, "implicit_symbol_scale", format_double(*o.sigma));
  }
  if (o.snapshot_every) {
    apply_config_override(cfg, "snapshot_every",
                          std::to_string(*o.snapshot_every));
  }

  PeriodicField u0;
  if (o.u0.find(':') != std::string::npos) {
    u0 = modes_field(cfg.grid, o.u0);
  } else {
    auto snap = read_snapshot(o.u0);
    if (snap.field.grid.dim != cfg.params.dim) {
      throw std::invalid_argument("snapshot dimension mismatch");
    }
    u0 = std::move(snap.field);
    cfg.grid = u0.grid;
  }

  emit_resolved(cfg, command);
  const FlowTrace trace = simulate(u0, cfg.params, cfg.scheme, cfg.stepper);
  write_trace_csv(cfg.out_dir / "trace.csv", trace);
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%06zu.dat", i);
    write_snapshot(cfg.out_dir / name, trace.snapshots[i].field,
                   cfg.params.alpha, trace.snapshots[i].t);
  }
  std::cout << "simulate: " << trace.termination << " at t "
            << format_double(trace.times.back()) << ", " << trace.times.size()
            << " steps, " << trace.snapshots.size() << " snapshots, mean "
            << format_double(trace.means.back()) << "\n";
  if (trace.termination != "completed") {
    std::cout << "simulate: exit 2 (blow-up)\n";
    return 2;
  }
  if (!trace.certified) {
    std::cout << "simulate: flat limit not converged (no exponential "
                 "certificate); exit 3\n";
    return 3;
  }
  std::cout << "simulate: C(u0) " << format_double(trace.c_limit)
            << " (decay rate " << format_double(trace.osc_fit.rate)
            << ", r2 " << format_double(trace.osc_fit.r2) << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
  CommonOpts common;
  std::string suite = "all";
  std::string json_path;
  std::optional<double> dt;
};

int run_verify(const VerifyOpts& o, const std::string& command) {
  RunConfig run_cfg = resolve_config(o.common);
  VerifyConfig cfg = VerifyConfig::defaults(run_cfg.params);
  cfg.seed = run_cfg.seed;
  if (o.common.grid_m) cfg.grid_m = *o.common.grid_m;
  if (o.common.cells) cfg.scheme.lattice_cells = *o.common.cells;
  if (o.dt) cfg.dt = *o.dt;

  std::vector<CheckReport> reports;
  if (o.suite == "all") {
    reports = run_all(cfg);
  } else if (o.suite == "constants") {
    reports.push_back(check_constants_stationary(cfg));
  } else if (o.suite == "max_principles") {
    GridSpec g(cfg.params.dim, cfg.flow_grid_m);
    PeriodicField u0 = modes_field(g, cfg.params.dim == 1 ? "1:0.05;0:0.1"
                                                          : "1,0:0.05;0,0:0.1");
    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = 0.1;
    reports.push_back(
        check_max_principles(simulate(u0, cfg.params, cfg.scheme, sc),
                             cfg.beta, cfg.tol));
  } else if (o.suite == "multiplier") {
    reports.push_back(check_multiplier_identity(cfg));
  } else if (o.suite == "decay") {
    reports.push_back(check_decay_rate(1e-2, 1, cfg));
  } else if (o.suite == "scaling") {
    reports.push_back(check_scaling_invariance(0.05, 2.0, cfg));
  } else if (o.suite == "translation") {
    reports.push_back(check_translation_equivariance(3.0, cfg));
  } else if (o.suite == "resolvent") {
    reports.push_back(check_resolvent_bounds(cfg));
  } else {
    throw std::invalid_argument(
        "unknown suite '" + o.suite +
        "' (expected all, constants, max_principles, multiplier, decay, "
        "scaling, translation, or resolvent)");
  }

  for (const auto& r : reports) {
    std::printf("%-16s [%s] %-7s measured %.6g tol %.6g %s\n", r.name.c_str(),
                r.paper_anchor.c_str(), r.status.c_str(), r.measured,
                r.tolerance, r.details.c_str());
  }
  if (!o.json_path.empty()) {
    const std::filesystem::path jpath(o.json_path);
    if (jpath.has_parent_path()) {
      std::filesystem::create_directories(jpath.parent_path());
    }
    std::ofstream js(jpath);
    if (!js) throw std::runtime_error("cannot write " + o.json_path);
    js << reports_to_json(reports);
    if (!js) throw std::runtime_error("cannot write " + o.json_path);
    run_cfg.out_dir = jpath.has_parent_path()
                          ? jpath.parent_path()
                          : std::filesystem::path(".");
    emit_resolved(run_cfg, command);
  }
  const bool ok = all_passed(reports);
  std::cout << (ok ? "verify: all checks passed\n"
                   : "verify: FAILURES present; exit 3\n");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fracflow: nonlocal mean curvature flow of periodic graphs "
      "(order alpha in (0,1), torus dimension 1 or 2)"};
  app.require_subcommand(1);
  const std::string command = shell_join(argc, argv);

  CurvatureOpts curv;
  auto* curv_cmd = app.add_subcommand(
      "curvature", "evaluate the nonlocal curvature of a field");
  add_common(curv_cmd, curv.common);
  curv_cmd->add_option("--modes", curv.modes,
                       "field as k:amplitude entries joined by ';'");
  curv_cmd->add_option("--field", curv.field_path, "field snapshot file");
  curv_cmd->add_option("--form", curv.form, "nmc | pv | both");

  SymbolOpts sym;
  auto* sym_cmd = app.add_subcommand(
      "symbol", "tabulate the frozen-slope multiplier symbol");
  add_common(sym_cmd, sym.common);
  sym_cmd->add_option("--slope", sym.slope, "frozen slope a1[,a2]");
  sym_cmd->add_option("--kmax", sym.kmax, "band half-width");
  sym_cmd->add_option("--method", sym.method, "direct | polar | both");
  sym_cmd->add_flag("--mikhlin", sym.mikhlin,
                    "also write the empirical multiplier-bound report");

  SimulateOpts simo;
  auto* sim_cmd = app.add_subcommand("simulate", "run the flow");
  add_common(sim_cmd, simo.common);
  sim_cmd->add_option("--u0", simo.u0,
                      "initial data: mode list (contains ':') or snapshot file");
  sim_cmd->add_option("--dt", simo.dt, "time step");
  sim_cmd->add_option("--t-end", simo.t_end, "final time");
  sim_cmd->add_option("--scheme", simo.scheme, "imex_cn | explicit_rk2");
  sim_cmd->add_option("--sigma", simo.sigma,
                      "implicit damping coefficient (imex_cn)");
  sim_cmd->add_option("--snapshot-every", simo.snapshot_every,
                      "steps between snapshots (0: first and last)");

  VerifyOpts ver;
  auto* ver_cmd =
      app.add_subcommand("verify", "run the property-verification suite");
  add_common(ver_cmd, ver.common);
  ver_cmd->add_option(
      "--suite", ver.suite,
      "all | constants | max_principles | multiplier | decay | scaling | "
      "translation | resolvent");
  ver_cmd->add_option("--json", ver.json_path, "write the JSON summary here");
  ver_cmd->add_option("--dt", ver.dt, "time step of the flow fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (curv_cmd->parsed()) return run_curvature(curv, command);
    if (sym_cmd->parsed()) return run_symbol(sym, command);
    if (sim_cmd->parsed()) return run_simulate(simo, command);
    if (ver_cmd->parsed()) return run_verify(ver, command);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
