#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracflow/flow.hpp"
#include "fracflow/grid.hpp"
#include "fracflow/kernels.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

/// One executable certificate: a named property with its measured margin.
struct CheckReport {
  std::string name;
  std::string paper_anchor;
  std::string status;  // "pass" | "fail" | "skipped"
  double measured = 0.0;
  double tolerance = 0.0;
  std::string details;
};

/// Tolerances of the verification suite, kept in one block.
struct VerifyTolerances {
  double constants_sup = 1e-10;       // |H(const)| forward bound
  double nonconstant_floor = 1e-6;    // converse probe floor
  double max_principle_base = 1e-8;   // + curvature * dt^2
  double max_principle_curv = 10.0;
  double multiplier_rel = 1e-4;       // relaxed to quadrature_tol in dim 2
  double decay_rel = 0.05;
  double fit_r2_min = 0.999;
  double fit_window = 0.4;            // trailing 60% (first 10% is transient)
  double scaling_factor = 5.0;        // * (dt + quadrature_tol)
  double horizontal_sup = 1e-10;
  double resolvent_band = 0.1;        // sup-decay ratio within 10%
  double quadrature_tol = 1e-5;       // 1e-3 in the reduced dim-2 fixture
};

struct VerifyConfig {
  FlowParams params{0.5, 1};
  double beta = 0.6;   // Holder exponent gating the time-derivative chain
  int grid_m = 256;    // operator-level fixtures
  int flow_grid_m = 64;  // simulation fixtures
  QuadratureScheme scheme = QuadratureScheme::defaults(1);
  double dt = 1e-3;
  std::uint64_t seed = 0x5eed2026;
  VerifyTolerances tol;

  /// Per-dimension defaults; dim 2 selects the reduced fixture
  /// (m = 32, 2 lattice shells, quadrature tolerance 1e-3).
  static VerifyConfig defaults(const FlowParams& p);
};

CheckReport check_constants_stationary(const VerifyConfig& cfg);

/// Monotonicity of the three sup-norm chains of a completed trace; the
/// time-derivative chain applies only under beta > alpha.
CheckReport check_max_principles(const FlowTrace& trace, double beta,
                                 const VerifyTolerances& tol = {});

CheckReport check_multiplier_identity(const VerifyConfig& cfg);

CheckReport check_decay_rate(double amplitude, int k, const VerifyConfig& cfg);

CheckReport check_scaling_invariance(double amplitude, double lambda,
                                     const VerifyConfig& cfg);

/// shift_cells must be whole (else the check reports skipped).
CheckReport check_translation_equivariance(double shift_cells,
                                           const VerifyConfig& cfg);

CheckReport check_resolvent_bounds(const VerifyConfig& cfg);

/// The full suite with default fixtures and fixed seeds.
std::vector<CheckReport> run_all(const VerifyConfig& cfg);

/// True when no non-skipped check failed.
bool all_passed(const std::vector<CheckReport>& reports);

/// Machine-readable summary: a JSON list of
/// {name, paper_anchor, status, measured, tolerance}.
std::string reports_to_json(const std::vector<CheckReport>& reports);

}  // namespace fracflow
