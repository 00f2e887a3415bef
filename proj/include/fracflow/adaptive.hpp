#pragma once

#include <functional>
#include <vector>

namespace fracflow {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence (cached per order).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Integral of f over [a, b] by the given rule.
double gauss_integrate(const std::function<double(double)>& f, double a,
                       double b, const GaussRule& rule);

/// Adaptive bisection quadrature with an embedded GL10/GL21 error estimate.
/// Splits until the local estimate meets the (local share of the) absolute
/// tolerance or max_depth is reached.
double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth = 48);

}  // namespace fracflow
