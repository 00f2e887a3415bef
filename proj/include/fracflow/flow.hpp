#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracflow/curvature.hpp"
#include "fracflow/grid.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

enum class TimeScheme { imex_cn, explicit_rk2 };

struct StepperConfig {
  double dt = 1e-3;
  double t_end = 1.0;  // rounded to a whole number of steps
  TimeScheme scheme = TimeScheme::imex_cn;
  /// sigma: the implicit leg integrates sigma * L with L the flat-slope
  /// linearization (symbol -omega_0 |k|^{1+alpha}); the explicit
  /// Adams-Bashforth leg carries the remainder Phi(u)[u] - sigma L u.
  double implicit_symbol_scale = 1.0;
  int snapshot_every = 0;  // 0: first and last only
};

struct Snapshot {
  double t = 0.0;
  PeriodicField field;
};

struct ExpFit {
  double log_amplitude = 0.0;
  double rate = 0.0;  // v ~ e^{log_amplitude - rate t}
  double r2 = 0.0;
  bool ok = false;
};

/// Log-linear least squares of v ~ A e^{-rate t} over the trailing window
/// [window_start * span, end]; needs >= 5 positive samples there.
ExpFit fit_exponential(const std::vector<double>& times,
                       const std::vector<double>& values, double window_start);

struct FlowTrace {
  GridSpec grid;
  double alpha = 0.5;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> sup_norms;                    // ||u||_inf
  std::vector<std::vector<double>> grad_sup_norms;  // per axis
  /// ||u^n - u^{n-1}||_inf / dt; entry 0 holds ||d_t u(0)||_inf exactly.
  std::vector<double> dt_sup_norms;
  std::vector<double> means;
  std::vector<double> osc_sup_norms;  // ||u - mean||_inf
  std::vector<double> besov;          // seminorm at s = 1.5
  std::vector<Snapshot> snapshots;
  std::string termination = "completed";  // or "blow-up detected"
  /// Explicit-scheme stability budget 2 / (omega_0 kmax^{1+alpha}).
  double rk2_dt_budget = 0.0;

  /// Flat-limit certification: the oscillation sup-norm fitted exponentially
  /// over the trailing 20% (r2 >= 0.999), and the mean drift closed by a
  /// geometric tail estimate.
  bool certified = false;
  double c_limit = 0.0;
  ExpFit osc_fit;
};

/// Thrown when a step leaves the finite range (sup-norm beyond 1e6 times the
/// initial one, or non-finite values); carries the last finite state.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double when, PeriodicField state)
      : std::runtime_error("blow-up detected"),
        t(when),
        last_state(std::move(state)) {}
  double t;
  PeriodicField last_state;
};

/// One bootstrapped time step (the Adams-Bashforth history is seeded with the
/// current nonlinearity). Throws BlowUpError on range escape.
PeriodicField flow_step(const PeriodicField& u, const FlowParams& p,
                        const QuadratureScheme& qs, const StepperConfig& sc);

/// Full run from u0. Blow-up ends the trace early with termination
/// "blow-up detected" (no throw); completed runs attempt the flat-limit
/// certification.
FlowTrace simulate(const PeriodicField& u0, const FlowParams& p,
                   const QuadratureScheme& qs, const StepperConfig& sc);

/// Exact scaling map u -> u_lambda(x, t) = u(lambda x, lambda^{1+alpha} t) /
/// lambda for integer lambda >= 1 (index decimation; throws
/// "non-integer rescaling breaks periodicity" otherwise). The Besov column is
/// scaled by lambda^{s-1}, exact for dyadic lambda.
FlowTrace rescale_solution(const FlowTrace& trace, double lambda,
                           const FlowParams& p);

/// Splits u = q + v with q the integral mean; the flow of u and of v differ
/// by the constant q only (the operator ignores constants).
std::pair<double, PeriodicField> decompose_mean(const PeriodicField& u);

}  // namespace fracflow
