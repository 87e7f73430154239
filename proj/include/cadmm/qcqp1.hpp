#pragma once

#include "cadmm/model.hpp"
#include "cadmm/rootfind.hpp"

namespace cadmm {

/// Eigendecomposition A = Q diag(lambda) Q^H, computed once per constraint and reused by
/// every projection onto that constraint.
struct EigenCache {
  Mat Q;
  RVec lambda;  // ascending

  explicit EigenCache(const HermitianMatrix& a);
};

enum class Qcqp1Status {
  AtInterior,  // zeta already feasible, mu = 0
  AtBoundary,
  PoleCase,  // I + mu Lambda singular at the optimum
};

/// Minimizer z of ||z - zeta||^2 over one constraint, with its multiplier in the canonical
/// (LessEqual-oriented) sign convention: z - zeta + mu (A z - b) = 0.
struct Qcqp1Solution {
  Vec z;
  double mu = 0.0;
  Qcqp1Status status = Qcqp1Status::AtInterior;
};

/// |a^H zeta| below this is treated as a vanishing projection; the phase is then fixed to 0.
inline constexpr double kDegeneratePhase = 1e-14;

/// Unit-modulus phase of s, or 1 when |s| < kDegeneratePhase.
Complex unit_phase(Complex s);

/// Signed change of |a^H z| needed to satisfy |a^H z|^2 (sense) c, starting from magnitude r.
/// Zero when r already satisfies the constraint. The lower side of a Bounded band with
/// c - eps < 0 never activates.
double rank1_shift(double r, double c, ConstraintSense sense);

/// Closed-form projection onto { z : |a^H z|^2 (sense) c }.
Qcqp1Solution solve_rank1_homogeneous(const Vec& a, double c, const Vec& zeta,
                                      ConstraintSense sense);

/// Projection onto z^H A z - 2 Re{b^H z} (sense) c for sense in {LessEqual, Equal, Bounded}.
/// GreaterEqual must be canonicalized first (InvalidInputError otherwise).
Qcqp1Solution solve_general(const EigenCache& cache, const Vec& b, double c, const Vec& zeta,
                            ConstraintSense sense, RootMethod rf = RootMethod::Bisection);

/// Two-sided band c - eps <= q(z) <= c + eps; rounds to the closer bound when zeta is outside.
Qcqp1Solution solve_bounded(const EigenCache& cache, const Vec& b, double c, double eps,
                            const Vec& zeta, RootMethod rf = RootMethod::Bisection);

struct GaussianMagnitudeSolution {
  Vec z;
  double w = 0.0;   // estimated noise term, equal to the multiplier
  double mu = 0.0;
};

/// argmin 1/2 w^2 + rho ||z - zeta||^2  s.t. |a^H z|^2 = y + w.  Requires rho > y ||a||^2.
GaussianMagnitudeSolution solve_gaussian_magnitude(const Vec& a, double y, double rho,
                                                   const Vec& zeta);

}  // namespace cadmm
