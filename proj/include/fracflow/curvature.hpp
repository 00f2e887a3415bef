#pragma once

#include "fracflow/grid.hpp"
#include "fracflow/kernels.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

enum class CurvatureForm { gradient_corrected, principal_value };

/// Point evaluation of the nonlocal mean curvature.
struct CurvatureResult {
  double value = 0.0;
  double tail_bound = 0.0;
  CurvatureForm form = CurvatureForm::gradient_corrected;
};

/// Field-wide evaluation (all grid nodes).
struct CurvatureField {
  PeriodicField values;
  double tail_bound = 0.0;
  CurvatureForm form = CurvatureForm::gradient_corrected;
};

/// H_alpha(u) at a grid node x (gradient-corrected integrand). x must be a
/// grid node; otherwise throws "off-grid evaluation unsupported".
CurvatureResult h_alpha_point(const PeriodicField& u, const Vec2& x,
                              const FlowParams& p, const QuadratureScheme& s);

/// Same operator through the symmetrized principal-value form.
CurvatureResult h_alpha_point_pv(const PeriodicField& u, const Vec2& x,
                                 const FlowParams& p,
                                 const QuadratureScheme& s);

CurvatureField h_alpha_field(const PeriodicField& u, const FlowParams& p,
                             const QuadratureScheme& s, CurvatureForm form);

/// Quasilinear operator Phi(u)[v]; Phi(u)[u] = -sqrt(1+|grad u|^2) H_alpha(u).
/// u and v must share a grid.
PeriodicField phi_apply(const PeriodicField& u, const PeriodicField& v,
                        const FlowParams& p, const QuadratureScheme& s);

/// Constant-coefficient comparison operator A^a[v] (kernel frozen at slope a).
PeriodicField frozen_apply(const PeriodicField& v, const Vec2& slope,
                           const FlowParams& p, const QuadratureScheme& s);

/// Rigorous bound on everything the quadrature discards outside the kept
/// lattice shells (plus the lattice-sum truncation remainders), valid for
/// both forms; shaped C(n, alpha) * osc(u) * R^{-1-alpha} with R = (2M+1) pi.
double tail_bound(const PeriodicField& u, const FlowParams& p,
                  const QuadratureScheme& s);
double tail_bound(const PeriodicField& u, const FlowParams& p,
                  const QuadratureScheme& s, CurvatureForm form);

}  // namespace fracflow
