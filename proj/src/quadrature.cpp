#include "fracflow/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fracflow/adaptive.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {

namespace {

std::string bits(double x) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(x));
  std::memcpy(&u, &x, sizeof(u));
  std::ostringstream os;
  os << std::hex << u;
  return os.str();
}

}  // namespace

QuadratureScheme QuadratureScheme::defaults(int dim) {
  QuadratureScheme s;
  if (dim == 2) {
    s.inner_radial_nodes = 24;
    s.inner_angular_nodes = 48;
    s.cell_nodes_per_axis = 14;
    s.far_nodes_per_axis = 24;
  }
  return s;
}

void QuadratureScheme::validate(int dim) const {
  if (!(inner_radius > 0.0 && inner_radius <= kPi))
    throw std::invalid_argument("inner radius must lie in (0, pi]");
  if (inner_radial_nodes < 2 || cell_nodes_per_axis < 2 ||
      far_nodes_per_axis < 2 || (dim == 2 && inner_angular_nodes < 2))
    throw std::invalid_argument("quadrature node counts must be >= 2");
  if (lattice_cells < 1)
    throw std::invalid_argument("lattice cell count must be >= 1");
  if (far_nodes_per_axis % 2 != 0)
    throw std::invalid_argument("far-field node count must be even");
  if (dim == 2 && inner_angular_nodes % 2 != 0)
    throw std::invalid_argument("angular node count must be even");
}

std::string QuadratureScheme::cache_key(const FlowParams& p) const {
  std::ostringstream os;
  os << p.dim << ':' << bits(p.alpha) << ':' << bits(inner_radius) << ':'
     << inner_radial_nodes << ':' << inner_angular_nodes << ':'
     << lattice_cells << ':' << cell_nodes_per_axis << ':'
     << far_nodes_per_axis << ':' << lattice_sum_extent;
  return os.str();
}

QuadratureScheme boosted_for_mode(const QuadratureScheme& base, double kmax) {
  QuadratureScheme s = base;
  const int osc = int(std::ceil(kmax));
  auto even = [](int n) { return n % 2 == 0 ? n : n + 1; };
  s.inner_radial_nodes = std::max(s.inner_radial_nodes, 16 + 3 * osc);
  s.inner_angular_nodes = even(std::max(s.inner_angular_nodes, 16 + 4 * osc));
  s.cell_nodes_per_axis =
      std::max(s.cell_nodes_per_axis, 8 + int(std::ceil(1.7 * osc)));
  s.far_nodes_per_axis =
      even(std::max(s.far_nodes_per_axis, 8 + int(std::ceil(1.7 * osc))));
  return s;
}

namespace {

/// Nodes of a Gauss-Legendre panel on [a, b]: (position, weight).
std::vector<std::pair<double, double>> gl_panel(double a, double b, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<std::pair<double, double>> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = {mid + half * rule.nodes[i], half * rule.weights[i]};
  return out;
}

/// Graded radial nodes for the inner patch: r = r0 * s^p with p = 2/(1-alpha),
/// as (r, dr-weight, log r) triples; weights are assembled in log space so
/// large p cannot overflow. Two composite panels in s keep the outer part of
/// the patch resolved when p is large.
struct RadialNode {
  double r, w_log;  // log of (dr/ds * GL weight), i.e. log radial weight
  double log_r;
};

std::vector<RadialNode> graded_radial(double r0, double alpha, int total) {
  const double p = 2.0 / (1.0 - alpha);
  const int n1 = total / 2, n2 = total - n1;
  std::vector<RadialNode> out;
  auto add_panel = [&](double a, double b, int n) {
    for (auto [s, w] : gl_panel(a, b, n)) {
      RadialNode node;
      node.log_r = std::log(r0) + p * std::log(s);
      node.r = std::exp(node.log_r);
      node.w_log = std::log(w * r0 * p) + (p - 1.0) * std::log(s);
      out.push_back(node);
    }
  };
  add_panel(0.0, 0.5, n1);
  add_panel(0.5, 1.0, n2);
  return out;
}

void build_dim1(Quadrature& q) {
  const double a = q.alpha, r0 = q.scheme.inner_radius;
  const double kernel_pow = -a;  // ws = w * r^{1-n-alpha}, n = 1
  // Graded inner patch (0, r0].
  for (const RadialNode& rn : graded_radial(r0, a, q.scheme.inner_radial_nodes)) {
    PairNode n;
    n.y = Vec2(rn.r, 0.0);
    n.r = rn.r;
    n.w = std::exp(rn.w_log);
    n.ws = std::exp(rn.w_log + kernel_pow * rn.log_r);
    q.plain.push_back(n);
  }
  // Central-cell completion [r0, pi].
  for (auto [r, w] : gl_panel(r0, kPi, q.scheme.inner_radial_nodes)) {
    PairNode n;
    n.y = Vec2(r, 0.0);
    n.r = r;
    n.w = w;
    n.ws = w * std::pow(r, kernel_pow);
    q.plain.push_back(n);
  }
  // Whole cells mu = 1..M.
  for (int mu = 1; mu <= q.scheme.lattice_cells; ++mu) {
    for (auto [r, w] :
         gl_panel(kTwoPi * mu - kPi, kTwoPi * mu + kPi,
                  q.scheme.cell_nodes_per_axis)) {
      PairNode n;
      n.y = Vec2(r, 0.0);
      n.r = r;
      n.w = w;
      n.ws = w * std::pow(r, kernel_pow);
      q.plain.push_back(n);
    }
  }
  // Fold nodes: positive half of a symmetric GL rule on [-pi, pi].
  for (auto [z, w] : gl_panel(-kPi, kPi, q.scheme.far_nodes_per_axis)) {
    if (z <= 0.0) continue;
    PairNode n;
    n.y = Vec2(z, 0.0);
    n.r = z;
    n.w = w;
    n.ws = w;  // fold weights are plain Lebesgue weights
    q.fold.push_back(n);
  }
}

void build_dim2(Quadrature& q) {
  const double a = q.alpha, r0 = q.scheme.inner_radius;
  const double kernel_pow = -1.0 - a;  // ws = w * r^{1-n-alpha}, n = 2
  // Graded inner disc: radial graded x uniform angular (half circle of
  // representatives; antipode phi + pi is the implied pair).
  const int n_phi = q.scheme.inner_angular_nodes;
  const double dphi = kTwoPi / n_phi;
  for (const RadialNode& rn : graded_radial(r0, a, q.scheme.inner_radial_nodes)) {
    for (int i = 0; i < n_phi / 2; ++i) {
      const double phi = (i + 0.5) * dphi;
      PairNode n;
      n.y = Vec2(rn.r * std::cos(phi), rn.r * std::sin(phi));
      n.r = rn.r;
      // area weight = (radial dr weight) * r * dphi
      const double w_log = rn.w_log + rn.log_r + std::log(dphi);
      n.w = std::exp(w_log);
      n.ws = std::exp(w_log + kernel_pow * rn.log_r);
      q.plain.push_back(n);
    }
  }
  // Octant patches completing the central cell: r in [r0, rho(phi)],
  // rho(phi) = pi / max(|cos phi|, |sin phi|); four representative octants.
  const int p_ang = q.scheme.cell_nodes_per_axis;
  const int p_rad = q.scheme.cell_nodes_per_axis;
  for (int oct = 0; oct < 4; ++oct) {
    for (auto [phi, wphi] :
         gl_panel(oct * kPi / 4.0, (oct + 1) * kPi / 4.0, p_ang)) {
      const double rho =
          kPi / std::max(std::abs(std::cos(phi)), std::abs(std::sin(phi)));
      for (auto [r, wr] : gl_panel(r0, rho, p_rad)) {
        PairNode n;
        n.y = Vec2(r * std::cos(phi), r * std::sin(phi));
        n.r = r;
        n.w = wphi * wr * r;
        n.ws = n.w * std::pow(r, kernel_pow);
        q.plain.push_back(n);
      }
    }
  }
  // Whole cells: representatives c with c1 > 0 or (c1 == 0 and c2 > 0).
  const int M = q.scheme.lattice_cells;
  const int pc = q.scheme.cell_nodes_per_axis;
  for (int c1 = -M; c1 <= M; ++c1) {
    for (int c2 = -M; c2 <= M; ++c2) {
      if (c1 == 0 && c2 == 0) continue;
      if (!(c1 > 0 || (c1 == 0 && c2 > 0))) continue;
      for (auto [y1, w1] :
           gl_panel(kTwoPi * c1 - kPi, kTwoPi * c1 + kPi, pc)) {
        for (auto [y2, w2] :
             gl_panel(kTwoPi * c2 - kPi, kTwoPi * c2 + kPi, pc)) {
          PairNode n;
          n.y = Vec2(y1, y2);
          n.r = n.y.norm();
          n.w = w1 * w2;
          n.ws = n.w * std::pow(n.r, kernel_pow);
          q.plain.push_back(n);
        }
      }
    }
  }
  // Fold nodes: z2 > 0 half of a symmetric tensor GL rule on the cell.
  const auto line = gl_panel(-kPi, kPi, q.scheme.far_nodes_per_axis);
  for (auto [z1, w1] : line) {
    for (auto [z2, w2] : line) {
      if (z2 <= 0.0) continue;
      PairNode n;
      n.y = Vec2(z1, z2);
      n.r = n.y.norm();
      n.w = w1 * w2;
      n.ws = n.w;
      q.fold.push_back(n);
    }
  }
}

}  // namespace

std::shared_ptr<const Quadrature> get_quadrature(const FlowParams& p,
                                                 const QuadratureScheme& s) {
  s.validate(p.dim);
  static std::map<std::string, std::shared_ptr<const Quadrature>> cache;
  static std::mutex mutex;
  const std::string key = s.cache_key(p);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto q = std::make_shared<Quadrature>();
  q->dim = p.dim;
  q->alpha = p.alpha;
  q->scheme = s;
  q->R = (2.0 * s.lattice_cells + 1.0) * kPi;
  q->key = key;
  if (p.dim == 1)
    build_dim1(*q);
  else
    build_dim2(*q);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, q).first->second;
}

namespace {

int default_extent(int dim) { return dim == 1 ? 20000 : 2000; }

/// K_a(y) = |y|^{-n-1-alpha} (1 + (y_hat . a)^2)^{-q} for lattice points.
struct FarKernel {
  int dim;
  double expo;  // n + 1 + alpha
  double q;
  Vec2 a;
  double operator()(const Vec2& y) const {
    const double r2 = dim == 1 ? y[0] * y[0] : y.squaredNorm();
    const double t2 = dim == 1 ? a[0] * a[0]
                               : [&] {
                                   const double d = y[0] * a[0] + y[1] * a[1];
                                   return d * d / r2;
                                 }();
    return std::pow(r2, -0.5 * expo) * std::pow(1.0 + t2, -q);
  }
};

}  // namespace

std::shared_ptr<const LatticeTables> get_lattice_tables(const Quadrature& quad,
                                                        const Vec2& slope) {
  static std::map<std::string, std::shared_ptr<const LatticeTables>> cache;
  static std::mutex mutex;
  const std::string key =
      quad.key + "|" + bits(slope[0]) + ":" + bits(slope[1]);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  const int n = quad.dim;
  const double alpha = quad.alpha;
  const int M = quad.scheme.lattice_cells;
  const int Mbig = quad.scheme.lattice_sum_extent > 0
                       ? quad.scheme.lattice_sum_extent
                       : default_extent(n);
  if (Mbig <= M)
    throw std::invalid_argument("lattice sum extent must exceed cell count");
  const FarKernel K{n, n + 1.0 + alpha, 0.5 * (n + 1 + alpha), slope};

  auto tables = std::make_shared<LatticeTables>();
  tables->S0.assign(quad.fold.size(), 0.0);
  tables->S1.assign(quad.fold.size(), Vec2::Zero());

  if (n == 1) {
    parallel_for(quad.fold.size(), [&](std::size_t i) {
      const double z = quad.fold[i].y[0];
      double s0 = 0.0, s1 = 0.0;
      for (int mu = M + 1; mu <= Mbig; ++mu) {
        const double c = kTwoPi * mu;
        const double kp = K(Vec2(z + c, 0.0)), km = K(Vec2(z - c, 0.0));
        s0 += kp + km;
        s1 += c * (kp - km);
      }
      tables->S0[i] = s0;
      tables->S1[i] = Vec2(s1, 0.0);
    });
    // Integral-comparison remainders (profile factor bounded by 1):
    // sum_{mu>Mb} (2 pi mu - pi)^{-2-a} <= (2 pi Mb - pi)^{-1-a} / (2 pi (1+a))
    const double edge = kTwoPi * Mbig - kPi;
    tables->rem0 = 2.0 * std::pow(edge, -1.0 - alpha) / (kTwoPi * (1.0 + alpha));
    // paired S1 terms: 2 pi mu |K(z+c)-K(z-c)| <= 2 pi mu (2+a) edge^{-3-a} 2 pi
    tables->rem1 = std::pow(kTwoPi, 2) * (2.0 + alpha) *
                   std::pow(kPi, -3.0 - alpha) *
                   std::pow(double(Mbig), -1.0 - alpha) / (1.0 + alpha);
  } else if (Mbig <= 256 || Mbig < 2 * (M + 1)) {
    // Small extents (reduced test fixtures): plain per-node shell sums with
    // integral-comparison remainders.
    std::vector<Eigen::Vector2i> reps;
    for (int c1 = -Mbig; c1 <= Mbig; ++c1)
      for (int c2 = -Mbig; c2 <= Mbig; ++c2) {
        if (std::max(std::abs(c1), std::abs(c2)) <= M) continue;
        if (!(c1 > 0 || (c1 == 0 && c2 > 0))) continue;
        reps.push_back({c1, c2});
      }
    parallel_for(quad.fold.size(), [&](std::size_t i) {
      const Vec2 z = quad.fold[i].y;
      double s0 = 0.0;
      Vec2 s1 = Vec2::Zero();
      for (const auto& c : reps) {
        const Vec2 shift(kTwoPi * c[0], kTwoPi * c[1]);
        const double kp = K(z + shift), km = K(z - shift);
        s0 += kp + km;
        s1 += shift * (kp - km);
      }
      tables->S0[i] = s0;
      tables->S1[i] = s1;
    });
    // Shell-count integral comparisons (see tail-bound assembly):
    // sum_{mu>Mb} 8 mu (2 pi mu - pi sqrt2)^{-3-a} <= 8 pi^{-3-a} Mb^{-1-a}/(1+a)
    tables->rem0 = 8.0 * std::pow(kPi, -3.0 - alpha) *
                   std::pow(double(Mbig), -1.0 - alpha) / (1.0 + alpha);
    tables->rem1 = 8.0 * 2.0 * std::pow(kTwoPi, 2) * (3.0 + alpha) *
                   std::pow(kPi, -4.0 - alpha) *
                   std::pow(double(Mbig), -1.0 - alpha) / (1.0 + alpha);
  } else {
    // Large extents. Shells M+1..Ms are summed per fold node. Beyond Ms the
    // fold offset z is tiny against the lattice point P = 2 pi c, and the
    // P <-> -P pairing kills odd Taylor orders, so the shifted sums collapse
    // to z-independent lattice moments
    //   S0(z) ~ sum K(P) + z . [sum D^2K(P)] z / 2,   S1(z) ~ [sum P (x) DK(P)] z,
    // accumulated in one pass over shells Ms+1..Mbig. The zeroth moment is
    // completed past the extent by the exact integral of K over
    // |y|_inf > 2 pi (Mbig + 1/2): the omitted far cells tile that region, so
    // only the midpoint-rule defect survives. Remainders are certified
    // empirically: every neglected component (Taylor residual past the check
    // band, corrected-moment residual past the extent) decays per
    // shell-doubling at least as fast as the kernel mass, ratio 2^{-1-alpha},
    // so the observed last-octave magnitudes bound the tails geometrically.
    const double beta = n + 1.0 + alpha;
    const double qexp = 0.5 * (n + 1 + alpha);
    const int Ms = std::min(std::max(128, 2 * M), Mbig / 2);
    const int bandLo = std::max(Ms / 2, M);
    const int Mhalf = Mbig / 2;

    struct Moments {
      double a0 = 0.0;
      Eigen::Matrix2d a2 = Eigen::Matrix2d::Zero();
      Eigen::Matrix2d b1 = Eigen::Matrix2d::Zero();
    };
    // K = r^-beta g(t), t = y_hat . a; DK = r^{-beta-1} V; D2K = r^{-beta-2} W.
    auto accumulate = [&](const Vec2& P, Moments& mo) {
      const double r = P.norm();
      const Vec2 yh = P / r;
      const double t = yh.dot(slope);
      const double u = 1.0 + t * t;
      const double g = std::pow(u, -qexp);
      const double gp = -2.0 * qexp * t * g / u;
      const double gpp =
          (-2.0 * qexp * g + 4.0 * qexp * (qexp + 1.0) * t * t * g / u) / u;
      const double rb = std::pow(r, -beta);
      const double cg = beta * g + t * gp;
      const Vec2 V = gp * slope - cg * yh;
      const Vec2 U = gpp * slope - ((beta + 1.0) * gp + t * gpp) * yh;
      const Eigen::Matrix2d W =
          -(beta + 1.0) * V * yh.transpose() +
          U * (slope - t * yh).transpose() -
          cg * (Eigen::Matrix2d::Identity() - yh * yh.transpose());
      mo.a0 += 2.0 * rb * g;                        // pair P, -P
      mo.b1 += (2.0 * rb / r) * P * V.transpose();  // P (x) DK, even pair
      mo.a2 += (2.0 * rb / (r * r)) * W;
    };
    // Half of shell mu (antipodal representatives), 4 mu points.
    auto for_half_shell = [](int mu, auto&& fn) {
      for (int c2 = -mu; c2 <= mu; ++c2) fn(mu, c2);
      for (int c1 = 1; c1 < mu; ++c1) {
        fn(c1, mu);
        fn(c1, -mu);
      }
      fn(0, mu);
    };

    // Moment pass over shells Ms+1..Mbig (parallel per shell, ordered reduce).
    const int n_shells = Mbig - Ms;
    std::vector<Moments> partial(n_shells);
    parallel_for(std::size_t(n_shells), [&](std::size_t s) {
      const int mu = Ms + 1 + int(s);
      for_half_shell(mu, [&](int c1, int c2) {
        accumulate(Vec2(kTwoPi * c1, kTwoPi * c2), partial[s]);
      });
    });
    Moments full, outer;
    for (int s = 0; s < n_shells; ++s) {
      full.a0 += partial[s].a0;
      full.a2 += partial[s].a2;
      full.b1 += partial[s].b1;
      if (Ms + 1 + s > Mhalf) {
        outer.a0 += partial[s].a0;
        outer.a2 += partial[s].a2;
        outer.b1 += partial[s].b1;
      }
    }
    // Moments of the check band (bandLo, Ms] (inside the explicit region).
    Moments band;
    for (int mu = bandLo + 1; mu <= Ms; ++mu)
      for_half_shell(mu, [&](int c1, int c2) {
        accumulate(Vec2(kTwoPi * c1, kTwoPi * c2), band);
      });

    // Explicit per-node pass over shells M+1..Ms, tracking the check band.
    std::vector<Eigen::Vector2i> reps;
    std::vector<char> in_band;
    for (int mu = M + 1; mu <= Ms; ++mu)
      for_half_shell(mu, [&](int c1, int c2) {
        reps.push_back({c1, c2});
        in_band.push_back(mu > bandLo ? 1 : 0);
      });
    std::vector<double> band0(quad.fold.size(), 0.0);
    std::vector<Vec2> band1(quad.fold.size(), Vec2::Zero());
    parallel_for(quad.fold.size(), [&](std::size_t i) {
      const Vec2 z = quad.fold[i].y;
      double s0 = 0.0, b0 = 0.0;
      Vec2 s1 = Vec2::Zero(), b1 = Vec2::Zero();
      for (std::size_t r = 0; r < reps.size(); ++r) {
        const Vec2 shift(kTwoPi * reps[r][0], kTwoPi * reps[r][1]);
        const double kp = K(z + shift), km = K(z - shift);
        s0 += kp + km;
        s1 += shift * (kp - km);
        if (in_band[r]) {
          b0 += kp + km;
          b1 += shift * (kp - km);
        }
      }
      tables->S0[i] = s0;
      tables->S1[i] = s1;
      band0[i] = b0;
      band1[i] = b1;
    });

    // Exact completion of the zeroth moment beyond the extent:
    // (2 pi)^{-2} int_{|y|_inf > 2 pi (ext + 1/2)} K_a(y) dy as an angular
    // integral (split at the diagonal kinks of the square boundary).
    auto corr_integral = [&](double extent) {
      const double L = kTwoPi * (extent + 0.5);
      auto f = [&](double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        const double t = c * slope[0] + s * slope[1];
        const double rho = L / std::max(std::abs(c), std::abs(s));
        return std::pow(1.0 + t * t, -qexp) * std::pow(rho, -1.0 - alpha);
      };
      const double tol = 1e-10 * std::pow(L, -1.0 - alpha);
      double total = 0.0;
      for (int k = 0; k < 8; ++k)
        total += adaptive_integrate(f, k * kPi / 4.0, (k + 1) * kPi / 4.0, tol);
      return total / (std::pow(kTwoPi, 2) * (1.0 + alpha));
    };
    const double corr_full = corr_integral(double(Mbig));
    const double corr_half = corr_integral(double(Mhalf));

    double d_tay0 = 0.0, d_tay1 = 0.0, d_out0 = 0.0, d_out1 = 0.0;
    for (std::size_t i = 0; i < quad.fold.size(); ++i) {
      const Vec2 z = quad.fold[i].y;
      tables->S0[i] += full.a0 + corr_full + 0.5 * z.dot(full.a2 * z);
      tables->S1[i] += full.b1 * z;
      d_tay0 = std::max(
          d_tay0, std::abs(band0[i] - (band.a0 + 0.5 * z.dot(band.a2 * z))));
      d_tay1 = std::max(d_tay1, (band1[i] - band.b1 * z).norm());
      d_out0 = std::max(d_out0, 0.5 * std::abs(z.dot(outer.a2 * z)));
      d_out1 = std::max(d_out1, (outer.b1 * z).norm());
    }
    d_out0 += std::abs(outer.a0 - (corr_half - corr_full));
    const double ratio = std::pow(2.0, -1.0 - alpha);
    const double geo = 2.0 * ratio / (1.0 - ratio);
    tables->rem0 = geo * (d_tay0 + d_out0) + 1e-13;
    tables->rem1 = geo * (d_tay1 + d_out1) + 1e-13;
  }

  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, tables).first->second;
}

}  // namespace fracflow
