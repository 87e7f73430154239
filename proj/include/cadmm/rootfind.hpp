#pragma once

#include <array>
#include <optional>

#include "cadmm/linalg.hpp"

namespace cadmm {

/// One constraint rotated into the eigenbasis of its quadratic term:
/// lambda ascending, zeta_t = Q^H zeta, b_t = Q^H b.
struct SpectralConstraint {
  RVec lambda;
  Vec zeta_t;
  Vec b_t;
  double c = 0.0;
};

/// Secular function
///   phi(mu) = sum_k lambda_k |(zt_k + mu bt_k) / (1 + mu lambda_k)|^2
///             - 2 Re sum_k conj(bt_k) (zt_k + mu bt_k) / (1 + mu lambda_k) - c,
/// i.e. the constraint residual of z(mu) = (I + mu Lambda)^{-1} (zeta_t + mu b_t).
/// Throws PoleError if some |1 + mu lambda_k| < 1e-14.
double phi(const SpectralConstraint& sc, double mu);

/// phi'(mu) = -2 sum_k |bt_k - lambda_k zt_k|^2 / (1 + mu lambda_k)^3.
double phi_prime(const SpectralConstraint& sc, double mu);

/// Multiplier range where I + mu Lambda is positive semidefinite. Endpoints may be infinite.
struct Interval {
  double lo;
  double hi;
};

Interval feasible_interval(const RVec& lambda);

enum class RootMethod { Bisection, Newton };

struct RootResult {
  double mu = 0.0;
  int iterations = 0;
  /// Newton hit its iteration cap (or a flat derivative) and the bisection root was used.
  bool fell_back = false;
};

inline constexpr double kDefaultRootTol = 1e-12;
inline constexpr int kBisectionMaxIter = 200;
inline constexpr int kNewtonMaxIter = 100;
inline constexpr int kBracketMaxDoublings = 200;

/// Bisection on the feasible interval. Infinite ends are replaced by doubling outward from
/// +-1 until phi changes sign. Throws InfeasibleConstraintError when no sign change exists.
RootResult solve_phi_bisection(const SpectralConstraint& sc, double eps = kDefaultRootTol);

/// Safeguarded Newton iteration stopped on phi^2 / |phi'| < eps, followed by a short polish.
/// Falls back to bisection after max_iter steps.
RootResult solve_phi_newton(const SpectralConstraint& sc, double eps = kDefaultRootTol,
                            int max_iter = kNewtonMaxIter);

RootResult solve_phi(const SpectralConstraint& sc, RootMethod method,
                     double eps = kDefaultRootTol);

/// Optimal multiplier sitting on a singular point of I + mu Lambda.
struct PoleRoot {
  double mu;
  /// First eigen-index k with 1 + mu lambda_k = 0; the free component lives there.
  Index index;
  /// Squared magnitude of the free component needed to meet the constraint.
  double free_norm_sq;
};

/// Checks mu = -1/lambda_max and mu = -1/lambda_min. A candidate is returned only when
/// zeta_t + mu b_t vanishes on the singular eigenspace (so phi has a finite limit there)
/// and that limit shows the root of phi lies outside the open interval.
std::optional<PoleRoot> pole_candidate(const SpectralConstraint& sc);

/// Per-measurement data of the noisy magnitude subproblem; requires rho > y * a_norm_sq.
struct CubicInputs {
  double y = 0.0;
  double rho = 1.0;
  double a_norm_sq = 1.0;
  /// |a^H (x - u)|^2
  double d = 0.0;
};

struct CubicRoots {
  double gamma3, gamma2, gamma1, gamma0;
  double delta0, delta1;
  double discriminant;  // delta1^2 - 4 delta0^3
  std::array<Complex, 3> roots;
};

/// The three closed-form roots of
///   a4 mu^3 + (2 rho a2 + y a4) mu^2 + (2 y rho a2 + rho^2) mu + y rho^2 - rho^2 d = 0
/// with a2 = |a|^2, a4 = |a|^4. Throws ConfigurationError if rho <= y * a_norm_sq.
CubicRoots cubic_roots(const CubicInputs& in);

/// The unique real root, i.e. the multiplier solving rho^2 d / (rho + a2 mu)^2 = y + mu.
double solve_cubic_mu(const CubicInputs& in);

}  // namespace cadmm
