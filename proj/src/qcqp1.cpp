#include "cadmm/qcqp1.hpp"

#include <algorithm>
#include <cmath>

namespace cadmm {

EigenCache::EigenCache(const HermitianMatrix& a) {
  // Real symmetric input keeps a real basis so real-field iterates stay exactly real.
  if (a.matrix().imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix().real());
    if (es.info() != Eigen::Success) {
      throw InvalidInputError("eigendecomposition of constraint matrix failed");
    }
    Q = es.eigenvectors().cast<Complex>();
    lambda = es.eigenvalues();
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix());
  if (es.info() != Eigen::Success) {
    throw InvalidInputError("eigendecomposition of constraint matrix failed");
  }
  Q = es.eigenvectors();
  lambda = es.eigenvalues();
}

Complex unit_phase(Complex s) {
  const double r = std::abs(s);
  return r < kDegeneratePhase ? Complex(1.0, 0.0) : s / r;
}

double rank1_shift(double r, double c, ConstraintSense sense) {
  switch (sense.kind()) {
    case ConstraintSense::Kind::Equal:
      if (c < 0.0) throw InfeasibleConstraintError("|a^H z|^2 = c with c < 0 is empty");
      return std::sqrt(c) - r;
    case ConstraintSense::Kind::LessEqual:
      if (c < 0.0) throw InfeasibleConstraintError("|a^H z|^2 <= c with c < 0 is empty");
      return std::min(0.0, std::sqrt(c) - r);
    case ConstraintSense::Kind::GreaterEqual:
      return c <= 0.0 ? 0.0 : std::max(0.0, std::sqrt(c) - r);
    case ConstraintSense::Kind::Bounded: {
      const double lo = c - sense.eps();
      const double hi = c + sense.eps();
      if (hi < 0.0) throw InfeasibleConstraintError("bounded magnitude band lies below zero");
      const double r2 = r * r;
      if (r2 < lo) return std::sqrt(lo) - r;
      if (r2 > hi) return std::sqrt(hi) - r;
      return 0.0;
    }
  }
  return 0.0;
}

Qcqp1Solution solve_rank1_homogeneous(const Vec& a, double c, const Vec& zeta,
                                      ConstraintSense sense) {
  if (a.size() != zeta.size()) throw InvalidInputError("rank-one projection: length mismatch");
  const double a2 = a.squaredNorm();
  if (!(a2 > 0.0)) throw InvalidInputError("rank-one projection: a must be non-zero");

  const Complex s = a.dot(zeta);
  const double r = std::abs(s);
  const double tau = rank1_shift(r, c, sense);
  if (tau == 0.0) return {zeta, 0.0, Qcqp1Status::AtInterior};

  Qcqp1Solution out;
  out.z = zeta + (unit_phase(s) * (tau / a2)) * a;
  const double target = r + tau;  // |a^H z| after the move
  // From z - zeta + mu a a^H z = 0: |a^H zeta| = (1 + mu |a|^2) |a^H z|.
  double mu = target > 0.0 ? (r / target - 1.0) / a2 : 0.0;
  if (sense.kind() == ConstraintSense::Kind::GreaterEqual) mu = -mu;
  out.mu = mu;
  out.status = r < kDegeneratePhase ? Qcqp1Status::PoleCase : Qcqp1Status::AtBoundary;
  return out;
}

Qcqp1Solution solve_general(const EigenCache& cache, const Vec& b, double c, const Vec& zeta,
                            ConstraintSense sense, RootMethod rf) {
  if (sense.kind() == ConstraintSense::Kind::GreaterEqual) {
    throw InvalidInputError("solve_general expects canonical senses; negate GreaterEqual first");
  }
  const Index n = cache.lambda.size();
  if (b.size() != n || zeta.size() != n) throw InvalidInputError("QCQP-1: length mismatch");

  SpectralConstraint sc{cache.lambda, cache.Q.adjoint() * zeta, cache.Q.adjoint() * b, c};
  const double f0 = phi(sc, 0.0);
  switch (sense.kind()) {
    case ConstraintSense::Kind::LessEqual:
      if (f0 <= 0.0) return {zeta, 0.0, Qcqp1Status::AtInterior};
      break;
    case ConstraintSense::Kind::Equal:
      if (f0 == 0.0) return {zeta, 0.0, Qcqp1Status::AtInterior};
      break;
    case ConstraintSense::Kind::Bounded:
      if (std::abs(f0) <= sense.eps()) return {zeta, 0.0, Qcqp1Status::AtInterior};
      // phi(mu) = +-eps is phi(mu) = 0 with c shifted towards the nearer bound.
      sc.c += f0 > 0.0 ? sense.eps() : -sense.eps();
      break;
    default:
      break;
  }

  Qcqp1Solution out;
  Vec zt(n);
  if (auto pole = pole_candidate(sc)) {
    out.mu = pole->mu;
    out.status = Qcqp1Status::PoleCase;
    const double lam_end = cache.lambda[pole->index];
    for (Index k = 0; k < n; ++k) {
      const double den = 1.0 + pole->mu * cache.lambda[k];
      if (std::abs(cache.lambda[k] - lam_end) <= 1e-12 * std::abs(lam_end)) {
        zt[k] = sc.b_t[k] / cache.lambda[k];
      } else {
        zt[k] = (sc.zeta_t[k] + pole->mu * sc.b_t[k]) / den;
      }
    }
    zt[pole->index] += std::sqrt(std::max(0.0, pole->free_norm_sq));
  } else {
    double mu = solve_phi(sc, rf).mu;
    if (sense.kind() == ConstraintSense::Kind::LessEqual) mu = std::max(0.0, mu);
    out.mu = mu;
    out.status = Qcqp1Status::AtBoundary;
    for (Index k = 0; k < n; ++k) {
      zt[k] = (sc.zeta_t[k] + mu * sc.b_t[k]) / (1.0 + mu * cache.lambda[k]);
    }
  }
  out.z = cache.Q * zt;
  return out;
}

Qcqp1Solution solve_bounded(const EigenCache& cache, const Vec& b, double c, double eps,
                            const Vec& zeta, RootMethod rf) {
  return solve_general(cache, b, c, zeta, ConstraintSense::bounded(eps), rf);
}

GaussianMagnitudeSolution solve_gaussian_magnitude(const Vec& a, double y, double rho,
                                                   const Vec& zeta) {
  if (a.size() != zeta.size()) throw InvalidInputError("magnitude subproblem: length mismatch");
  const double a2 = a.squaredNorm();
  const Complex s = a.dot(zeta);
  const double mu = solve_cubic_mu({y, rho, a2, std::norm(s)});
  GaussianMagnitudeSolution out;
  out.mu = mu;
  out.w = mu;
  out.z = zeta - (mu * s / (rho + mu * a2)) * a;
  return out;
}

}  // namespace cadmm
