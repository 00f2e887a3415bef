#include "fracflow/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "fracflow/adaptive.hpp"

namespace fracflow {

namespace {

std::uint64_t bit_key(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}

double i_alpha_impl(double alpha) {
  // [0, 1]: power series of 1 - cos t against t^{-2-alpha}.
  double series = 0.0;
  double fact = 1.0;  // (2j)!
  double sign = 1.0;
  for (int j = 1; j <= 40; ++j) {
    fact *= (2.0 * j - 1.0) * (2.0 * j);
    const double term = sign / (fact * (2.0 * j - 1.0 - alpha));
    series += term;
    sign = -sign;
    if (std::abs(term) < 1e-18 * std::abs(series)) break;
  }
  // [1, inf): int t^{-2-alpha} = 1/(1+alpha), minus the oscillatory part
  // rotated onto t = 1 + i s where it decays like e^{-s}:
  //   int_1^inf cos(t) t^{-2-alpha} dt
  //     = Re[ i e^{i} int_0^inf e^{-s} (1 + i s)^{-2-alpha} ds ].
  auto tail_part = [&](bool real_part) {
    return adaptive_integrate(
        [&](double s) {
          const std::complex<double> w =
              std::exp(-s) *
              std::pow(std::complex<double>(1.0, s), -2.0 - alpha);
          return real_part ? w.real() : w.imag();
        },
        0.0, 45.0, 1e-14);
  };
  const std::complex<double> T(tail_part(true), tail_part(false));
  const std::complex<double> ei(std::cos(1.0), std::sin(1.0));
  const double cos_tail = (std::complex<double>(0.0, 1.0) * ei * T).real();
  return series + 1.0 / (1.0 + alpha) - cos_tail;
}

std::mutex cache_mutex;

}  // namespace

double i_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("order out of range");
  static std::map<std::uint64_t, double> cache;
  const std::uint64_t key = bit_key(alpha);
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const double v = i_alpha_impl(alpha);
  return cache.emplace(key, v).first->second;
}

double omega0(const FlowParams& p) {
  static std::map<std::pair<std::uint64_t, int>, double> cache;
  const auto key = std::make_pair(bit_key(p.alpha), p.dim);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double ia = i_alpha(p.alpha);
  double v = 0.0;
  if (p.dim == 1) {
    v = 4.0 * ia;
  } else {
    // 2 I_alpha * int_0^{2pi} |cos phi|^{1+alpha} dphi (quarter symmetry).
    const double ang = 4.0 * adaptive_integrate(
                                 [&](double phi) {
                                   return std::pow(std::cos(phi),
                                                   1.0 + p.alpha);
                                 },
                                 0.0, 0.5 * kPi, 2.5e-11);
    v = 2.0 * ia * ang;
  }
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache.emplace(key, v).first->second;
}

double symbol_direct(const Eigen::Vector2i& k, const Vec2& slope,
                     const FlowParams& p, const QuadratureScheme& s) {
  if (p.dim == 1 && k[1] != 0)
    throw std::invalid_argument("mode outside the 1-d lattice");
  Vec2 kv(double(k[0]), p.dim == 2 ? double(k[1]) : 0.0);
  const double kn = kv.norm();
  if (kn == 0.0) return 0.0;

  const auto quad = get_quadrature(p, boosted_for_mode(s, kn));
  const auto tables = get_lattice_tables(*quad, slope);
  const auto profile = KernelProfile::get(p.q());

  // m = -2 [ sum_pairs 2 w (1 - cos(y.k)) K(y) + fold ], with
  // w K = ws g(y_hat.a) / r^2 and the stable evaluation of (1-cos)/r^2.
  double plain = 0.0;
  for (const auto& node : quad->plain) {
    const double theta = node.y[0] * kv[0] + node.y[1] * kv[1];
    double dval;  // 2 (1 - cos theta) / r^2
    if (std::abs(theta) < 1e-4) {
      const double kappa = theta / node.r;
      dval = kappa * kappa * (1.0 - theta * theta / 12.0);
    } else {
      // 2 (1 - cos theta) = 4 sin^2(theta/2)
      const double sh = std::sin(0.5 * theta) / node.r;
      dval = 4.0 * sh * sh;
    }
    const double that = (node.y[0] * slope[0] + node.y[1] * slope[1]) / node.r;
    plain += node.ws * (*profile)(that)*dval;
  }
  double fold = 0.0;
  for (std::size_t i = 0; i < quad->fold.size(); ++i) {
    const Vec2& z = quad->fold[i].y;
    const double theta = z[0] * kv[0] + z[1] * kv[1];
    const double sh = std::sin(0.5 * theta);
    fold += quad->fold[i].w * 4.0 * sh * sh * tables->S0[i];
  }
  return -2.0 * (plain + fold);
}

namespace {

/// Angular profile integral of the polar factorization in dim 2:
/// P_a(x) = -2 I_alpha int_0^{2pi} |g(phi) . e|^{1+alpha}
///          [1 + (H a . g(phi))^2]^{-q} dphi
/// after the Householder map H sending x_hat to the chart axis e.
double polar_profile_dim2(const Vec2& x, const Vec2& slope,
                          const FlowParams& p) {
  const Vec2 xh = x / x.norm();
  // Default chart axis e2; switch to e1 within 10 degrees of the +e2 ray.
  int axis = 1;
  if (std::acos(std::clamp(xh[1], -1.0, 1.0)) < kPi / 18.0) axis = 0;
  const Vec2 e = axis == 0 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);

  Vec2 ha;  // H a, with H the reflection swapping x_hat and e
  if ((xh - e).norm() < 1e-14) {
    ha = slope;
  } else {
    const Vec2 w = (xh - e).normalized();
    ha = slope - 2.0 * w.dot(slope) * w;
  }
  const double q = p.q();
  auto f = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    const double ge = axis == 0 ? c : s;
    const double t = ha[0] * c + ha[1] * s;
    return std::pow(std::abs(ge), 1.0 + p.alpha) *
           std::pow(1.0 + t * t, -q);
  };
  // Split at the zeros of g . e, where the integrand has a |.|^{1+alpha} kink.
  const double z0 = axis == 0 ? 0.5 * kPi : 0.0;
  double total = 0.0;
  for (int j = 0; j < 2; ++j)
    total += adaptive_integrate(f, z0 + j * kPi, z0 + (j + 1) * kPi, 5e-12);
  return -2.0 * i_alpha(p.alpha) * total;
}

}  // namespace

double symbol_profile(const Vec2& x, const Vec2& slope, const FlowParams& p) {
  const double xn = p.dim == 1 ? std::abs(x[0]) : x.norm();
  if (xn == 0.0) throw std::invalid_argument("symbol undefined at origin");
  if (p.dim == 1 && x[1] != 0.0)
    throw std::invalid_argument("mode outside the 1-d lattice");
  if (p.dim == 1) {
    const double a = slope[0];
    return -4.0 * i_alpha(p.alpha) *
           std::pow(1.0 + a * a, -0.5 * (2.0 + p.alpha));
  }
  return polar_profile_dim2(x, slope, p);
}

double symbol_polar(const Vec2& x, const Vec2& slope, const FlowParams& p) {
  const double xn = p.dim == 1 ? std::abs(x[0]) : x.norm();
  if (xn == 0.0) throw std::invalid_argument("symbol undefined at origin");
  return std::pow(xn, 1.0 + p.alpha) * symbol_profile(x, slope, p);
}

SymbolTable build_symbol_table(const GridSpec& g, const Vec2& slope,
                               const FlowParams& p) {
  if (g.dim != p.dim)
    throw std::invalid_argument("operator fields must share a grid");
  SymbolTable table;
  table.grid = g;
  table.alpha = p.alpha;
  table.slope = slope;
  table.values = Array::Zero(g.size());
  table.normalized = Array::Zero(g.size());
  if (p.dim == 1) {
    const double prof = symbol_profile(Vec2(1.0, 0.0), slope, p);
    for (Eigen::Index b = 1; b < g.size(); ++b) {
      const double k = std::abs(double(wavenumber(int(b), g.m)));
      table.normalized[b] = prof;
      table.values[b] = prof * std::pow(k, 1.0 + p.alpha);
    }
    return table;
  }
  // dim 2: one angular integral per direction; profiles repeat along rays,
  // so cache by primitive direction.
  std::map<std::pair<int, int>, double> dir_cache;
  for (int b1 = 0; b1 < g.m; ++b1)
    for (int b2 = 0; b2 < g.m; ++b2) {
      const int k1 = wavenumber(b1, g.m), k2 = wavenumber(b2, g.m);
      if (k1 == 0 && k2 == 0) continue;
      const int gcd = std::gcd(std::abs(k1), std::abs(k2));
      const auto dir = std::make_pair(k1 / gcd, k2 / gcd);
      auto it = dir_cache.find(dir);
      if (it == dir_cache.end())
        it = dir_cache
                 .emplace(dir, symbol_profile(Vec2(dir.first, dir.second),
                                              slope, p))
                 .first;
      const Eigen::Index bin = Eigen::Index(b1) * g.m + b2;
      const double kn = std::hypot(double(k1), double(k2));
      table.normalized[bin] = it->second;
      table.values[bin] = it->second * std::pow(kn, 1.0 + p.alpha);
    }
  return table;
}

MikhlinReport mikhlin_sup(const Vec2& slope, const FlowParams& p,
                          const MikhlinProbe& probe) {
  if (probe.n_radial < 2 || probe.fd_step_rel <= 0.0)
    throw std::invalid_argument("invalid probe grid");
  MikhlinReport rep;
  rep.inf_abs_profile = std::numeric_limits<double>::infinity();
  const int n_deriv = p.dim == 1 ? 2 : 5;  // (1),(2) / (1,0),(0,1),(2,0),(1,1),(0,2)
  const int max_order = p.dim / 2 + 1;     // N = [n/2] + 1
  rep.derivative_sups.assign(p.dim == 1 ? max_order : 5, 0.0);

  auto P = [&](const Vec2& x) { return symbol_profile(x, slope, p); };

  std::vector<Vec2> probes;
  for (int i = 0; i < probe.n_radial; ++i) {
    const double r = probe.r_min * std::pow(probe.r_max / probe.r_min,
                                            double(i) /
                                                (probe.n_radial - 1.0));
    if (p.dim == 1) {
      probes.emplace_back(r, 0.0);
      probes.emplace_back(-r, 0.0);
    } else {
      for (int j = 0; j < probe.n_angular; ++j) {
        const double phi = kTwoPi * (j + 0.5) / probe.n_angular;
        probes.emplace_back(r * std::cos(phi), r * std::sin(phi));
      }
    }
  }

  for (const Vec2& x : probes) {
    const double r = p.dim == 1 ? std::abs(x[0]) : x.norm();
    const double h = probe.fd_step_rel * r;
    const double p0 = P(x);
    rep.inf_abs_profile = std::min(rep.inf_abs_profile, std::abs(p0));
    if (p.dim == 1) {
      const Vec2 e1(1.0, 0.0);
      const double pp = P(x + h * e1), pm = P(x - h * e1);
      rep.derivative_sups[0] = std::max(rep.derivative_sups[0],
                                        r * std::abs((pp - pm) / (2.0 * h)));
    } else {
      const Vec2 e1(1.0, 0.0), e2(0.0, 1.0);
      const double p10 = P(x + h * e1), m10 = P(x - h * e1);
      const double p01 = P(x + h * e2), m01 = P(x - h * e2);
      const double d[5] = {
          (p10 - m10) / (2.0 * h),
          (p01 - m01) / (2.0 * h),
          (p10 - 2.0 * p0 + m10) / (h * h),
          (P(x + h * (e1 + e2)) - P(x + h * (e1 - e2)) -
           P(x - h * (e1 - e2)) + P(x - h * (e1 + e2))) /
              (4.0 * h * h),
          (p01 - 2.0 * p0 + m01) / (h * h)};
      const int order[5] = {1, 1, 2, 2, 2};
      for (int j = 0; j < n_deriv; ++j)
        if (order[j] <= max_order)
          rep.derivative_sups[j] =
              std::max(rep.derivative_sups[j],
                       std::pow(r, order[j]) * std::abs(d[j]));
    }
  }
  rep.m_emp = 1.0 / rep.inf_abs_profile;
  for (double s : rep.derivative_sups) rep.m_emp = std::max(rep.m_emp, s);
  return rep;
}

}  // namespace fracflow
