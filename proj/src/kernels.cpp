#include "fracflow/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fracflow/adaptive.hpp"

namespace fracflow {

FlowParams::FlowParams(double alpha_, int dim_) : alpha(alpha_), dim(dim_) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("order out of range");
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
}

double F_eval(double xi, const FlowParams& p) {
  const double expo = p.dim - 1 + p.alpha;  // 2q - 2
  return adaptive_integrate(
      [expo](double theta) { return std::pow(std::cos(theta), expo); },
      std::atan(xi), 0.5 * M_PI, 1e-13);
}

double F_prime(double xi, const FlowParams& p) {
  return -std::pow(1.0 + xi * xi, -p.q());
}

double f_eval(double s, const FlowParams& p) {
  return (2.0 / p.alpha) * std::pow(1.0 + s * s, -p.q());
}

KernelProfile::KernelProfile(double q) : q_(q) {
  const int n = 4096;  // intervals on [0, t_max]
  h_ = t_max_ / n;
  inv_h_ = 1.0 / h_;
  val_.resize(n + 1);
  der_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = i * h_;
    const double base = 1.0 + t * t;
    val_[i] = std::pow(base, -q_);
    der_[i] = -2.0 * q_ * t * std::pow(base, -q_ - 1.0);
  }
}

double KernelProfile::exact(double tau) const {
  return std::pow(1.0 + tau * tau, -q_);
}

std::shared_ptr<const KernelProfile> KernelProfile::get(double q) {
  static std::map<std::uint64_t, std::shared_ptr<const KernelProfile>> cache;
  static std::mutex mutex;
  std::uint64_t key;
  static_assert(sizeof(key) == sizeof(q));
  std::memcpy(&key, &q, sizeof(key));
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache
             .emplace(key, std::shared_ptr<const KernelProfile>(
                               new KernelProfile(q)))
             .first;
  return it->second;
}

}  // namespace fracflow
