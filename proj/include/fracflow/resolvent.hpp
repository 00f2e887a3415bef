#pragma once

#include "fracflow/grid.hpp"
#include "fracflow/symbols.hpp"

namespace fracflow {

/// Smoothed lifting symbol m_s(rho): 1 for rho <= 1/2, rho^s for rho >= 1,
/// and exp(s log(rho) S(1 + log2(rho))) in between with S the quintic
/// smoothstep (C^2 blend). m_s(0) = 1 by convention, so constants pass
/// through untouched.
double cutoff_symbol(double rho, double s);

/// Lifting operator I_t: multiplies each nonzero mode by |k|^t (k = 0 is
/// untouched); t may be negative, and I_t I_{-t} inverts to rounding error.
SpectralField lifting_apply(const SpectralField& v, double t);

/// Resolvent parameters: (lambda - delta A_a)^{-1} composed with the lifting
/// cutoff, guaranteed on the half-plane Re lambda >= 1 for delta >= 1.
struct ResolventSpec {
  Complex lambda{1.0, 0.0};
  double delta = 1.0;
  Vec2 slope = Vec2::Zero();

  void validate() const;  // throws outside the guaranteed half-plane
};

/// Applies m_{1+alpha}(|k|) / (lambda - delta m_a(k)) bin-wise, with m_a from
/// the symbol table (polar route).
SpectralField resolvent_apply(const SpectralField& v, const ResolventSpec& rs,
                              const SymbolTable& table);

/// Certificate data of the resolvent bound over the grid band:
///   min_k |lambda - delta m_a(k)| / max{|lambda|, |m_a(k)|}  (>= 1), and
///   sup_k 1/|lambda - delta m_a(k)| (= 1/|lambda|, attained at k = 0).
struct ResolventCheck {
  double min_ratio = 0.0;
  double sup_inverse = 0.0;
};

ResolventCheck resolvent_check(const ResolventSpec& rs,
                               const SymbolTable& table);

}  // namespace fracflow
