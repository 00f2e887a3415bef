#pragma once

#include <vector>

#include "fracflow/grid.hpp"
#include "fracflow/kernels.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

/// I_alpha = integral_0^inf (1 - cos t) t^{-2-alpha} dt, evaluated without
/// special functions: a power series on [0, 1] plus a contour-rotated
/// Laplace-type tail (cached per alpha).
double i_alpha(double alpha);

/// Linearization constant omega_0 > 0: the symbol of the linearized operator
/// at slope 0 is -omega_0 |k|^{1+alpha}. dim 1: 4 I_alpha; dim 2:
/// 2 I_alpha * integral_0^{2pi} |cos phi|^{1+alpha} dphi. Cached; adaptive
/// quadrature to 1e-10 absolute.
double omega0(const FlowParams& p);

/// Symbol m_a(k) = -2 integral (1 - cos(y.k)) K_a(y) dy of the frozen-slope
/// operator, by the same graded-polar + lattice-cell + folded-far-field
/// machinery as the curvature quadrature (node counts auto-scaled with |k|).
/// k must be a lattice mode; m_a(0) = 0.
double symbol_direct(const Eigen::Vector2i& k, const Vec2& slope,
                     const FlowParams& p, const QuadratureScheme& s);

/// Same symbol through the polar factorization m_a(x) = |x|^{1+alpha} P_a(x),
/// valid for any x != 0 (throws "symbol undefined at origin" at x = 0).
/// dim 1 reduces to a closed expression in I_alpha; dim 2 is a single angular
/// integral after a Householder rotation (the alternate chart is used within
/// 10 degrees of the +e2 ray).
double symbol_polar(const Vec2& x, const Vec2& slope, const FlowParams& p);

/// The homogeneous-degree-0 profile P_a(x) = m_a(x)/|x|^{1+alpha}.
double symbol_profile(const Vec2& x, const Vec2& slope, const FlowParams& p);

/// Frozen-slope data with an optional certificate (tau, delta) in the
/// parameter strip delta in [1, eta].
struct FrozenSlope {
  Vec2 a = Vec2::Zero();
  bool has_certificate = false;
  double tau = 0.0;
  double delta = 1.0;
  double eta = 1.0;
};

/// Tabulated symbol over a grid's frequency band.
struct SymbolTable {
  GridSpec grid;
  double alpha = 0.5;
  Vec2 slope = Vec2::Zero();
  Array values;      // m_a(k) per bin (0 at k = 0)
  Array normalized;  // P_a(k) = m_a(k) |k|^{-1-alpha} per bin (0 at k = 0)
};

/// Table via the polar route (the independent reference for the quadrature
/// evaluators).
SymbolTable build_symbol_table(const GridSpec& g, const Vec2& slope,
                               const FlowParams& p);

/// Empirical Mikhlin-type data for P_a over a log-radial probe grid,
/// derivatives up to order N = [n/2] + 1 by central differences with
/// step zeta |x|.
struct MikhlinProbe {
  double r_min = 1e-2, r_max = 1e2;
  int n_radial = 12;
  int n_angular = 16;  // dim 2 only
  double fd_step_rel = 1e-2;
};

struct MikhlinReport {
  double inf_abs_profile = 0.0;
  /// sup over probes of |x|^{|mu|} |d^mu P_a|, for each multi-index mu with
  /// 1 <= |mu| <= N, in lexicographic order ((1),(2) for dim 1;
  /// (1,0),(0,1),(2,0),(1,1),(0,2) for dim 2 truncated to |mu| <= N).
  std::vector<double> derivative_sups;
  double m_emp = 0.0;  // max(1/inf_abs_profile, derivative sups)
};

MikhlinReport mikhlin_sup(const Vec2& slope, const FlowParams& p,
                          const MikhlinProbe& probe = {});

}  // namespace fracflow
