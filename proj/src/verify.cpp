#include "fracflow/verify.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fracflow/curvature.hpp"
#include "fracflow/resolvent.hpp"
#include "fracflow/symbols.hpp"
#include "fracflow/transforms.hpp"

namespace fracflow {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

/// Worst increase along a chain that should be non-increasing.
double worst_increase(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i)
    worst = std::max(worst, v[i] - v[i - 1]);
  return worst;
}

}  // namespace

VerifyConfig VerifyConfig::defaults(const FlowParams& p) {
  VerifyConfig cfg;
  cfg.params = p;
  cfg.scheme = QuadratureScheme::defaults(p.dim);
  if (p.dim == 2) {
    // Reduced fixture: coarse grid, M = 2 lattice shells, relaxed quadrature
    // tolerance. Node counts are sized so the whole dim-2 suite completes in
    // minutes on one core while every margin below stays well inside 1e-3.
    cfg.grid_m = 32;
    cfg.flow_grid_m = 16;
    cfg.scheme.lattice_cells = 2;
    cfg.scheme.inner_radial_nodes = 16;
    cfg.scheme.inner_angular_nodes = 16;
    cfg.scheme.cell_nodes_per_axis = 8;
    cfg.scheme.far_nodes_per_axis = 24;
    cfg.dt = 1.5e-3;
    cfg.tol.quadrature_tol = 1e-3;
    cfg.tol.multiplier_rel = 1e-3;
  }
  return cfg;
}

CheckReport check_constants_stationary(const VerifyConfig& cfg) {
  CheckReport rep;
  rep.name = "constants_stationary";
  rep.paper_anchor = "L:8";
  rep.tolerance = cfg.tol.constants_sup;

  const GridSpec g(cfg.params.dim, cfg.grid_m);
  double worst = 0.0;
  for (double c : {-3.0, 0.0, 7.0}) {
    const PeriodicField u{g, Array::Constant(g.size(), c)};
    for (auto form :
         {CurvatureForm::gradient_corrected, CurvatureForm::principal_value}) {
      const CurvatureField cf = h_alpha_field(u, cfg.params, cfg.scheme, form);
      worst = std::max(worst, cf.values.values.abs().maxCoeff());
    }
  }

  // Converse probe: no false stationary points among random band fields.
  // In dim 2 a scattered 16-node sample stands in for the full grid: any
  // sampled value already lower-bounds sup |H_alpha(u)|, which is what the
  // floor tests, at a fraction of the cost.
  double min_probe = std::numeric_limits<double>::infinity();
  const int band = g.dim == 1 ? g.m / 4 : 4;
  for (int i = 0; i < 50; ++i) {
    const PeriodicField u =
        random_band_field(g, band, 0.05, cfg.seed + 7 * i);
    double peak = 0.0;
    if (g.dim == 1) {
      const CurvatureField cf = h_alpha_field(
          u, cfg.params, cfg.scheme, CurvatureForm::gradient_corrected);
      peak = cf.values.values.abs().maxCoeff();
    } else {
      for (int t = 0; t < 16; ++t) {
        const Eigen::Index j1 = (7 * t + 3) % g.m, j2 = (11 * t + 5) % g.m;
        const Vec2 x = g.node(j1 * g.m + j2);
        peak = std::max(
            peak, std::abs(h_alpha_point(u, x, cfg.params, cfg.scheme).value));
      }
    }
    min_probe = std::min(min_probe, peak);
  }

  rep.measured = worst;
  const bool converse_ok = min_probe > cfg.tol.nonconstant_floor;
  rep.status = (worst <= rep.tolerance && converse_ok) ? "pass" : "fail";
  rep.details = "constants {-3, 0, 7}, both forms; converse_min=" +
                fmt(min_probe) + " floor=" + fmt(cfg.tol.nonconstant_floor);
  return rep;
}

CheckReport check_max_principles(const FlowTrace& trace, double beta,
                                 const VerifyTolerances& tol) {
  CheckReport rep;
  rep.name = "max_principles";
  rep.paper_anchor = "L:9";
  rep.tolerance =
      tol.max_principle_base + tol.max_principle_curv * trace.dt * trace.dt;

  double worst = worst_increase(trace.sup_norms);
  for (const auto& chain : trace.grad_sup_norms)
    worst = std::max(worst, worst_increase(chain));
  const bool dt_chain = beta > trace.alpha;
  if (dt_chain) worst = std::max(worst, worst_increase(trace.dt_sup_norms));

  rep.measured = worst;
  rep.status = worst <= rep.tolerance ? "pass" : "fail";
  rep.details = dt_chain
                    ? "sup, per-axis gradient and time-derivative chains"
                    : "time-derivative chain skipped (needs beta > alpha)";
  return rep;
}

CheckReport check_multiplier_identity(const VerifyConfig& cfg) {
  CheckReport rep;
  rep.name = "multiplier_identity";
  rep.paper_anchor = "fmult";
  rep.tolerance = cfg.tol.multiplier_rel;

  const GridSpec g(cfg.params.dim, cfg.grid_m);
  std::vector<Eigen::Vector2i> modes;
  std::vector<Vec2> slopes;
  if (cfg.params.dim == 1) {
    modes = {{1, 0}, {2, 0}, {5, 0}};
    slopes = {Vec2(0.0, 0.0), Vec2(1.0, 0.0)};
  } else {
    modes = {{1, 0}, {1, 1}, {0, 2}};
    slopes = {Vec2(0.0, 0.0), Vec2(0.5, -0.3)};
  }
  std::vector<ModeSpec> spec;
  double amp = 1.0;
  for (const auto& k : modes) {
    spec.push_back({k, amp, 0.25 * amp});
    amp *= 0.7;
  }
  const PeriodicField v = make_field(g, spec);
  const CArray vh = to_spectral(v).coeffs;

  double worst = 0.0;
  for (const Vec2& a : slopes) {
    const SymbolTable table = build_symbol_table(g, a, cfg.params);
    const PeriodicField av = frozen_apply(v, a, cfg.params, cfg.scheme);
    const CArray avh = to_spectral(av).coeffs;
    for (const auto& k : modes) {
      const Eigen::Index bin =
          cfg.params.dim == 1
              ? Eigen::Index(bin_of(k[0], g.m))
              : Eigen::Index(bin_of(k[0], g.m)) * g.m + bin_of(k[1], g.m);
      const Complex ratio = avh[bin] / vh[bin];
      const double ma = table.values[bin];
      worst = std::max(worst,
                       std::abs(ratio - ma) / std::max(std::abs(ma), 1e-12));
    }
  }
  rep.measured = worst;
  rep.status = worst <= rep.tolerance ? "pass" : "fail";
  rep.details = "frozen-slope application vs polar symbol table, " +
                std::to_string(slopes.size()) + " slopes, " +
                std::to_string(modes.size()) + " modes";
  return rep;
}

CheckReport check_decay_rate(double amplitude, int k,
                             const VerifyConfig& cfg) {
  CheckReport rep;
  rep.name = "decay_rate";
  rep.paper_anchor = "MT2 (Exst)";
  rep.tolerance = cfg.tol.decay_rel;

  const GridSpec g(cfg.params.dim, cfg.flow_grid_m);
  PeriodicField u0 = make_field(g, {{{k, 0}, amplitude, 0.0}});
  u0.values += 0.5;
  const double expected =
      omega0(cfg.params) * std::pow(double(k), 1.0 + cfg.params.alpha);

  StepperConfig sc;
  sc.t_end = 6.5 / expected;
  // 130 steps resolve the rate to ~2e-4 relative: the trapezoidal update's
  // per-mode factor biases the fitted rate by (rate*dt)^2 / 12.
  sc.dt = sc.t_end / 130.0;
  const FlowTrace trace = simulate(u0, cfg.params, cfg.scheme, sc);
  if (trace.termination != "completed") {
    rep.status = "fail";
    rep.measured = std::numeric_limits<double>::infinity();
    rep.details = trace.termination;
    return rep;
  }
  const ExpFit fit =
      fit_exponential(trace.times, trace.osc_sup_norms, cfg.tol.fit_window);
  if (!fit.ok || fit.r2 < cfg.tol.fit_r2_min) {
    rep.status = "skipped";
    rep.details = "fit not certified: r2=" + fmt(fit.ok ? fit.r2 : 0.0);
    return rep;
  }
  rep.measured = std::abs(fit.rate - expected) / expected;
  rep.status = rep.measured <= rep.tolerance ? "pass" : "fail";
  rep.details = "k=" + std::to_string(k) + " fitted=" + fmt(fit.rate) +
                " expected=" + fmt(expected) + " r2=" + fmt(fit.r2);
  return rep;
}

CheckReport check_scaling_invariance(double amplitude, double lambda,
                                     const VerifyConfig& cfg) {
  CheckReport rep;
  rep.name = "scaling_invariance";
  rep.paper_anchor = "R:1";
  rep.tolerance = cfg.tol.scaling_factor * (cfg.dt + cfg.tol.quadrature_tol);

  const long L = std::lround(lambda);
  const GridSpec g(cfg.params.dim, cfg.flow_grid_m);
  const PeriodicField u0 = make_field(g, {{{1, 0}, amplitude, 0.0}});
  StepperConfig sa;
  sa.dt = cfg.dt;
  sa.t_end = cfg.params.dim == 1 ? 0.3 : 0.15;
  const FlowTrace ta = simulate(u0, cfg.params, cfg.scheme, sa);
  const FlowTrace tr = rescale_solution(ta, lambda, cfg.params);

  const PeriodicField v0 =
      make_field(g, {{{int(L), 0}, amplitude / lambda, 0.0}});
  const double ts = std::pow(lambda, 1.0 + cfg.params.alpha);
  StepperConfig sb;
  sb.dt = sa.dt / ts;
  sb.t_end = sa.t_end / ts;
  const FlowTrace tb = simulate(v0, cfg.params, cfg.scheme, sb);

  double worst = 0.0;
  const std::size_t nn = std::min(tr.times.size(), tb.times.size());
  for (std::size_t i = 0; i < nn; ++i)
    worst = std::max(worst, std::abs(tr.sup_norms[i] - tb.sup_norms[i]));
  if (!tr.snapshots.empty() && !tb.snapshots.empty())
    worst = std::max(worst, (tr.snapshots.back().field.values -
                             tb.snapshots.back().field.values)
                                .abs()
                                .maxCoeff());
  rep.measured = worst;
  rep.status = (worst <= rep.tolerance && tb.termination == "completed" &&
                ta.termination == "completed")
                   ? "pass"
                   : "fail";
  rep.details = "lambda=" + fmt(lambda) + ", matched-time sup norms and final fields";
  return rep;
}

CheckReport check_translation_equivariance(double shift_cells,
                                           const VerifyConfig& cfg) {
  CheckReport rep;
  rep.name = "translation_equivariance";
  rep.paper_anchor = "eqqu";
  rep.tolerance = cfg.tol.horizontal_sup;

  if (std::abs(shift_cells - std::round(shift_cells)) > 0.0) {
    rep.status = "skipped";
    rep.details = "shift is off-grid (" + fmt(shift_cells) + " cells)";
    return rep;
  }
  const int s = int(std::lround(shift_cells));
  const GridSpec g(cfg.params.dim, cfg.grid_m);
  const PeriodicField u =
      random_band_field(g, 6, 0.05, cfg.seed + 1234, /*quantize_dyadic=*/true);
  const PeriodicField pu = phi_apply(u, u, cfg.params, cfg.scheme);

  // Vertical: adding an exactly representable constant reproduces the field
  // bit for bit.
  const PeriodicField uc{g, u.values + 5.0};
  const PeriodicField puc = phi_apply(uc, uc, cfg.params, cfg.scheme);
  const double vertical = (puc.values - pu.values).abs().maxCoeff();

  // Horizontal: shift by whole cells, compare with the shifted result.
  auto shift_field = [&](const Array& vals) {
    Array out(vals.size());
    const int m = g.m;
    if (g.dim == 1) {
      for (int j = 0; j < m; ++j)
        out[j] = vals[((j - s) % m + m) % m];
    } else {
      for (int j1 = 0; j1 < m; ++j1)
        for (int j2 = 0; j2 < m; ++j2)
          out[Eigen::Index(j1) * m + j2] =
              vals[Eigen::Index(((j1 - s) % m + m) % m) * m +
                   ((j2 - s) % m + m) % m];
    }
    return out;
  };
  const PeriodicField ut{g, shift_field(u.values)};
  const PeriodicField put = phi_apply(ut, ut, cfg.params, cfg.scheme);
  const double horizontal =
      (put.values - shift_field(pu.values)).abs().maxCoeff();

  rep.measured = std::max(vertical, horizontal);
  rep.status = (vertical == 0.0 && horizontal <= rep.tolerance) ? "pass"
                                                                : "fail";
  rep.details = "vertical(+5)=" + fmt(vertical) + " (exact), horizontal(" +
                std::to_string(s) + " cells)=" + fmt(horizontal);
  return rep;
}

CheckReport check_resolvent_bounds(const VerifyConfig& cfg) {
  CheckReport rep;
  rep.name = "resolvent_bounds";
  rep.paper_anchor = "bddb";
  rep.tolerance = 1.0;  // direction: measured >= tolerance

  const GridSpec g(cfg.params.dim, cfg.grid_m);
  const std::vector<Vec2> slopes = {Vec2(0.0, 0.0), Vec2(0.4, 0.0)};
  const std::vector<Complex> lambdas = {
      {1.0, 0.0}, {1.0, 100.0}, {10.0, 0.0}, {100.0, 0.0}};
  double min_ratio = std::numeric_limits<double>::infinity();
  double sup10 = 0.0, sup100 = 0.0;
  for (const Vec2& a : slopes) {
    const SymbolTable table = build_symbol_table(g, a, cfg.params);
    for (const Complex& l : lambdas) {
      ResolventSpec rs;
      rs.lambda = l;
      rs.slope = a;
      const ResolventCheck chk = resolvent_check(rs, table);
      min_ratio = std::min(min_ratio, chk.min_ratio);
      if (l == Complex(10.0, 0.0)) sup10 = chk.sup_inverse;
      if (l == Complex(100.0, 0.0)) sup100 = chk.sup_inverse;
    }
  }
  const double decay_ratio = sup10 / sup100;
  const bool decay_ok = decay_ratio >= 10.0 * (1.0 - cfg.tol.resolvent_band) &&
                        decay_ratio <= 10.0 * (1.0 + cfg.tol.resolvent_band);
  rep.measured = min_ratio;
  rep.status = (min_ratio >= rep.tolerance && decay_ok) ? "pass" : "fail";
  rep.details = "min |lambda - delta m|/max{|lambda|,|m|} over modes; "
                "sup-decay ratio 10->100 = " +
                fmt(decay_ratio);
  return rep;
}

std::vector<CheckReport> run_all(const VerifyConfig& cfg) {
  std::vector<CheckReport> reports;
  reports.push_back(check_constants_stationary(cfg));

  // Max principles over a constant trace plus seeded small-data runs.
  {
    const GridSpec g(cfg.params.dim, cfg.flow_grid_m);
    const int runs = cfg.params.dim == 1 ? 10 : 3;
    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = cfg.params.dim == 1 ? 0.12 : 0.045;
    CheckReport merged;
    bool first = true;
    int done = 0;
    for (int i = -1; i < runs; ++i) {
      const PeriodicField u0 =
          i < 0 ? PeriodicField{g, Array::Constant(g.size(), 0.3)}
                : random_band_field(g, 3, 0.01, cfg.seed + 100 + 31 * i);
      const FlowTrace trace = simulate(u0, cfg.params, cfg.scheme, sc);
      if (trace.termination != "completed") continue;
      const CheckReport one = check_max_principles(trace, cfg.beta, cfg.tol);
      ++done;
      if (first) {
        merged = one;
        first = false;
      } else {
        merged.measured = std::max(merged.measured, one.measured);
        if (one.status == "fail") merged.status = "fail";
      }
    }
    if (first) {
      merged.name = "max_principles";
      merged.paper_anchor = "L:9";
      merged.status = "fail";
      merged.details = "no completed runs";
    } else {
      merged.details += "; runs=" + std::to_string(done) + " (1 constant)";
    }
    reports.push_back(merged);
  }

  reports.push_back(check_multiplier_identity(cfg));
  reports.push_back(check_decay_rate(1e-2, 1, cfg));
  reports.push_back(check_decay_rate(1e-2, 2, cfg));
  reports.push_back(check_scaling_invariance(0.02, 2.0, cfg));
  reports.push_back(check_translation_equivariance(3.0, cfg));
  reports.push_back(check_resolvent_bounds(cfg));
  return reports;
}

bool all_passed(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports)
    if (r.status == "fail") return false;
  return true;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string reports_to_json(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  auto number = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g",
                  std::isfinite(x) ? x : (x > 0 ? 1e308 : -1e308));
    return std::string(buf);
  };
  os << "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    os << "  {\"name\": \"" << json_escape(r.name) << "\", \"paper_anchor\": \""
       << json_escape(r.paper_anchor) << "\", \"status\": \""
       << json_escape(r.status) << "\", \"measured\": " << number(r.measured)
       << ", \"tolerance\": " << number(r.tolerance) << "}"
       << (i + 1 < reports.size() ? ",\n" : "\n");
  }
  os << "]\n";
  return os.str();
}

}  // namespace fracflow
