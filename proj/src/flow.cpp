#include "fracflow/flow.hpp"

#include <cmath>
#include <limits>

#include "fracflow/littlewood_paley.hpp"
#include "fracflow/symbols.hpp"
#include "fracflow/transforms.hpp"

namespace fracflow {

namespace {

constexpr double kBesovExponent = 1.5;
constexpr double kBlowUpFactor = 1e6;

/// Symbol of the implicit leg: sigma * (-omega_0 |k|^{1+alpha}) per bin.
Array linear_symbol(const GridSpec& g, const FlowParams& p, double sigma) {
  const double w0 = omega0(p);
  Array sym = Array::Zero(g.size());
  for (Eigen::Index b = 0; b < sym.size(); ++b) {
    const Eigen::Vector2i k = wavevector(g, b);
    const double kn = std::hypot(double(k[0]), double(k[1]));
    if (kn > 0.0) sym[b] = -sigma * w0 * std::pow(kn, 1.0 + p.alpha);
  }
  return sym;
}

bool in_range(const PeriodicField& u, double sup0) {
  const double s = u.values.abs().maxCoeff();
  return std::isfinite(s) && s <= kBlowUpFactor * std::max(sup0, 1e-300);
}

double rk2_budget(const GridSpec& g, const FlowParams& p) {
  const double kmax = 0.5 * g.m * std::sqrt(double(g.dim));
  return 2.0 / (omega0(p) * std::pow(kmax, 1.0 + p.alpha));
}

struct StepperState {
  GridSpec grid;
  FlowParams params;
  QuadratureScheme qs;
  StepperConfig sc;
  Array lsym;  // implicit-leg symbol
  double sup0 = 0.0;
  bool have_history = false;
  CArray n_prev;

  explicit StepperState(const PeriodicField& u0, const FlowParams& p,
                        const QuadratureScheme& qs_, const StepperConfig& sc_)
      : grid(u0.grid),
        params(p),
        qs(qs_),
        sc(sc_),
        lsym(linear_symbol(u0.grid, p, sc_.implicit_symbol_scale)),
        sup0(u0.values.abs().maxCoeff()) {}

  /// Advances u one step of size dt; phi0 receives Phi(u)[u] (the exact
  /// initial time derivative) when non-null.
  PeriodicField advance(const PeriodicField& u, double dt, double t_now,
                        PeriodicField* phi0) {
    const PeriodicField phi = phi_apply(u, u, params, qs);
    if (phi0) *phi0 = phi;
    PeriodicField next;
    if (sc.scheme == TimeScheme::explicit_rk2) {
      PeriodicField mid{grid, u.values + 0.5 * dt * phi.values};
      if (!in_range(mid, sup0)) throw BlowUpError(t_now, u);
      const PeriodicField phi_mid = phi_apply(mid, mid, params, qs);
      next = PeriodicField{grid, u.values + dt * phi_mid.values};
    } else {
      const CArray uh = to_spectral(u).coeffs;
      const CArray nh = to_spectral(phi).coeffs - lsym.cast<Complex>() * uh;
      if (!have_history) {
        n_prev = nh;
        have_history = true;
      }
      const CArray num = (1.0 + 0.5 * dt * lsym).cast<Complex>() * uh +
                         dt * (1.5 * nh - 0.5 * n_prev);
      const CArray den = (1.0 - 0.5 * dt * lsym).cast<Complex>();
      SpectralField out{grid, num / den};
      n_prev = nh;
      next = to_physical(out);
    }
    if (!in_range(next, sup0)) throw BlowUpError(t_now, u);
    return next;
  }
};

}  // namespace

PeriodicField flow_step(const PeriodicField& u, const FlowParams& p,
                        const QuadratureScheme& qs, const StepperConfig& sc) {
  if (!(sc.dt > 0.0)) throw std::invalid_argument("step size must be positive");
  StepperState st(u, p, qs, sc);
  return st.advance(u, sc.dt, 0.0, nullptr);
}

ExpFit fit_exponential(const std::vector<double>& times,
                       const std::vector<double>& values,
                       double window_start) {
  ExpFit fit;
  if (times.size() != values.size() || times.empty()) return fit;
  const double t0 = times.front(), t1 = times.back();
  const double cut = t0 + window_start * (t1 - t0);
  std::vector<double> ts, ls;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < cut) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) return fit;
    ts.push_back(times[i]);
    ls.push_back(std::log(values[i]));
  }
  if (ts.size() < 5) return fit;
  const double n = double(ts.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += ls[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * ls[i];
  }
  const double det = n * stt - st * st;
  if (det <= 0.0) return fit;
  const double slope = (n * stl - st * sl) / det;
  const double intercept = (sl - slope * st) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_l = sl / n;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double pred = intercept + slope * ts[i];
    ss_res += (ls[i] - pred) * (ls[i] - pred);
    ss_tot += (ls[i] - mean_l) * (ls[i] - mean_l);
  }
  fit.log_amplitude = intercept;
  fit.rate = -slope;
  fit.r2 = ss_tot > 1e-20 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-20 ? 1.0 : 0.0);
  fit.ok = true;
  return fit;
}

FlowTrace simulate(const PeriodicField& u0, const FlowParams& p,
                   const QuadratureScheme& qs, const StepperConfig& sc) {
  if (!(sc.dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(sc.t_end > 0.0)) throw std::invalid_argument("end time must be positive");
  const long steps = std::max(1L, std::lround(sc.t_end / sc.dt));

  FlowTrace trace;
  trace.grid = u0.grid;
  trace.alpha = p.alpha;
  trace.dt = sc.dt;
  trace.rk2_dt_budget = rk2_budget(u0.grid, p);
  trace.grad_sup_norms.assign(u0.grid.dim, {});

  const LittlewoodPaleyFamily family = make_lp_family(u0.grid);
  auto record = [&](double t, const PeriodicField& u) {
    trace.times.push_back(t);
    trace.sup_norms.push_back(sup_norm(u));
    for (int ax = 0; ax < u.grid.dim; ++ax)
      trace.grad_sup_norms[ax].push_back(grad_sup_norm(u, ax));
    const double mean = integral_mean(u);
    trace.means.push_back(mean);
    trace.osc_sup_norms.push_back((u.values - mean).abs().maxCoeff());
    trace.besov.push_back(besov_seminorm(u, kBesovExponent, family));
  };

  StepperState st(u0, p, qs, sc);
  PeriodicField u = u0;
  record(0.0, u);
  trace.snapshots.push_back({0.0, u});
  trace.dt_sup_norms.push_back(0.0);  // patched with ||Phi(u0)[u0]|| below

  for (long i = 1; i <= steps; ++i) {
    PeriodicField phi0;
    PeriodicField next;
    try {
      next = st.advance(u, sc.dt, double(i - 1) * sc.dt,
                        i == 1 ? &phi0 : nullptr);
    } catch (const BlowUpError&) {
      trace.termination = "blow-up detected";
      break;
    }
    if (i == 1) trace.dt_sup_norms[0] = sup_norm(phi0);
    const double t = double(i) * sc.dt;
    trace.dt_sup_norms.push_back((next.values - u.values).abs().maxCoeff() /
                                 sc.dt);
    u = next;
    record(t, u);
    if (sc.snapshot_every > 0 && i % sc.snapshot_every == 0 && i != steps)
      trace.snapshots.push_back({t, u});
    if (i == steps) trace.snapshots.push_back({t, u});
  }

  if (trace.termination != "completed") return trace;

  // Flat-limit certification. Trivially converged traces (oscillation at the
  // noise floor) certify directly; otherwise the oscillation must fit an
  // exponential over the trailing window and the mean drift must close.
  const double floor = 1e-13 * std::max(1.0, trace.sup_norms.front());
  trace.osc_fit = fit_exponential(trace.times, trace.osc_sup_norms, 0.8);
  const bool osc_dead = trace.osc_sup_norms.back() <= floor;
  const bool osc_ok =
      osc_dead || (trace.osc_fit.ok && trace.osc_fit.r2 >= 0.999 &&
                   trace.osc_fit.rate > 0.0);

  const double q_end = trace.means.back();
  bool q_ok = false;
  double tail = 0.0;
  std::vector<double> dq_t, dq_v;
  for (std::size_t i = 1; i < trace.means.size(); ++i) {
    dq_t.push_back(trace.times[i]);
    dq_v.push_back(std::abs(trace.means[i] - trace.means[i - 1]));
  }
  const double dq_last = dq_v.empty() ? 0.0 : dq_v.back();
  if (dq_last <= 1e-14 * (1.0 + std::abs(q_end))) {
    q_ok = true;  // drift at rounding level
  } else {
    const ExpFit qfit = fit_exponential(dq_t, dq_v, 0.8);
    if (qfit.ok && qfit.r2 >= 0.999 && qfit.rate > 0.0) {
      const double rho = std::exp(-qfit.rate * sc.dt);
      if (rho < 1.0) {
        const double signed_last =
            trace.means.back() - trace.means[trace.means.size() - 2];
        tail = signed_last * rho / (1.0 - rho);
        q_ok = true;
      }
    }
  }
  trace.certified = osc_ok && q_ok;
  trace.c_limit = q_end + (q_ok ? tail : 0.0);
  return trace;
}

FlowTrace rescale_solution(const FlowTrace& trace, double lambda,
                           const FlowParams& p) {
  if (!(lambda >= 1.0) || std::abs(lambda - std::round(lambda)) > 0.0)
    throw std::invalid_argument("non-integer rescaling breaks periodicity");
  const long L = std::lround(lambda);
  const double ts = std::pow(lambda, 1.0 + p.alpha);  // time contraction

  FlowTrace out = trace;
  out.dt = trace.dt / ts;
  for (auto& t : out.times) t /= ts;
  for (auto& v : out.sup_norms) v /= lambda;
  for (auto& v : out.means) v /= lambda;
  for (auto& v : out.osc_sup_norms) v /= lambda;
  for (auto& v : out.dt_sup_norms) v *= std::pow(lambda, p.alpha);
  for (auto& v : out.besov) v *= std::pow(lambda, kBesovExponent - 1.0);
  // Gradient sups are scale-invariant under u -> u(lambda .)/lambda.

  const int m = trace.grid.m;
  for (auto& snap : out.snapshots) {
    snap.t /= ts;
    Array dec(snap.field.values.size());
    if (trace.grid.dim == 1) {
      for (int j = 0; j < m; ++j)
        dec[j] = snap.field.values[(L * j) % m] / lambda;
    } else {
      for (int j1 = 0; j1 < m; ++j1)
        for (int j2 = 0; j2 < m; ++j2)
          dec[Eigen::Index(j1) * m + j2] =
              snap.field.values[Eigen::Index((L * j1) % m) * m +
                                (L * j2) % m] /
              lambda;
    }
    snap.field.values = std::move(dec);
  }

  out.c_limit = trace.c_limit / lambda;
  if (trace.osc_fit.ok) {
    out.osc_fit.log_amplitude = trace.osc_fit.log_amplitude - std::log(lambda);
    out.osc_fit.rate = trace.osc_fit.rate * ts;
  }
  return out;
}

std::pair<double, PeriodicField> decompose_mean(const PeriodicField& u) {
  const double q = integral_mean(u);
  return {q, PeriodicField{u.grid, u.values - q}};
}

}  // namespace fracflow
