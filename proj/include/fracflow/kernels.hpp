#pragma once

#include <memory>
#include <vector>

namespace fracflow {

/// Order and ambient dimension of the nonlocal curvature operator.
struct FlowParams {
  double alpha = 0.5;
  int dim = 1;

  FlowParams() = default;
  FlowParams(double alpha_, int dim_);  // validates; throws on bad input

  /// Kernel exponent q = (n + 1 + alpha)/2; the interaction kernel is
  /// [ |y|^2 + delta^2 ]^{-q}.
  double q() const { return 0.5 * (dim + 1 + alpha); }
};

/// F(xi) = integral_xi^inf (1 + tau^2)^{-q} dtau, evaluated through the
/// tau = tan(theta) substitution (bounded smooth integrand) to 1e-12.
double F_eval(double xi, const FlowParams& p);

/// F'(xi) = -(1 + xi^2)^{-q} (closed form).
double F_prime(double xi, const FlowParams& p);

/// Quasilinear coefficient f(s) = (2/alpha) (1 + s^2)^{-q}.
double f_eval(double s, const FlowParams& p);

/// Fast evaluator for the even profile g(tau) = (1 + tau^2)^{-q}: a cubic
/// Hermite table on [0, 8] (absolute error < 1e-11), direct pow outside.
/// This is the hot inner function of all quadrature loops.
class KernelProfile {
 public:
  static std::shared_ptr<const KernelProfile> get(double q);

  double operator()(double tau) const {
    double t = tau < 0 ? -tau : tau;
    if (t >= t_max_) return exact(t);
    const double s = t * inv_h_;
    const int i = int(s);
    const double u = s - i;
    const double u2 = u * u, um = 1.0 - u;
    return (1.0 + 2.0 * u) * um * um * val_[i] +
           u * um * um * h_ * der_[i] +
           u2 * (3.0 - 2.0 * u) * val_[i + 1] +
           u2 * (u - 1.0) * h_ * der_[i + 1];
  }

  double exact(double tau) const;
  double q() const { return q_; }

 private:
  explicit KernelProfile(double q);

  double q_ = 1.25;
  double t_max_ = 8.0;
  double h_ = 0.0, inv_h_ = 0.0;
  std::vector<double> val_, der_;
};

}  // namespace fracflow
