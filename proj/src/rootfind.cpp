#include "cadmm/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cadmm {

namespace {

constexpr double kPoleGuard = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const SpectralConstraint& sc) {
  const Index n = sc.lambda.size();
  if (n == 0 || sc.zeta_t.size() != n || sc.b_t.size() != n) {
    throw InvalidInputError("spectral constraint lengths disagree");
  }
}

// phi without the pole check: a numerically singular term returns the infinity the
// one-sided limit approaches from inside the feasible interval.
double phi_raw(const SpectralConstraint& sc, double mu) {
  double total = -sc.c;
  const bool homogeneous = sc.b_t.isZero(0.0);
  for (Index k = 0; k < sc.lambda.size(); ++k) {
    const double lam = sc.lambda[k];
    const double den = 1.0 + mu * lam;
    if (std::abs(den) < kPoleGuard) return std::copysign(kInf, lam);
    if (homogeneous) {
      total += lam * std::norm(sc.zeta_t[k]) / (den * den);
      continue;
    }
    const Complex w = (sc.zeta_t[k] + mu * sc.b_t[k]) / den;
    total += lam * std::norm(w) - 2.0 * (std::conj(sc.b_t[k]) * w).real();
  }
  return total;
}

double phi_prime_raw(const SpectralConstraint& sc, double mu) {
  double total = 0.0;
  for (Index k = 0; k < sc.lambda.size(); ++k) {
    const double den = 1.0 + mu * sc.lambda[k];
    if (std::abs(den) < kPoleGuard) return -kInf;
    total += std::norm(sc.b_t[k] - sc.lambda[k] * sc.zeta_t[k]) / (den * den * den);
  }
  return -2.0 * total;
}

void check_pole(const SpectralConstraint& sc, double mu) {
  for (Index k = 0; k < sc.lambda.size(); ++k) {
    if (std::abs(1.0 + mu * sc.lambda[k]) < kPoleGuard) {
      throw PoleError("secular function evaluated at a pole: mu = " + std::to_string(mu) +
                      ", lambda = " + std::to_string(sc.lambda[k]));
    }
  }
}

}  // namespace

double phi(const SpectralConstraint& sc, double mu) {
  validate(sc);
  check_pole(sc, mu);
  return phi_raw(sc, mu);
}

double phi_prime(const SpectralConstraint& sc, double mu) {
  validate(sc);
  check_pole(sc, mu);
  return phi_prime_raw(sc, mu);
}

Interval feasible_interval(const RVec& lambda) {
  if (lambda.size() == 0) throw InvalidInputError("empty eigenvalue list");
  const double lmin = lambda.minCoeff();
  const double lmax = lambda.maxCoeff();
  return {lmax > 0.0 ? -1.0 / lmax : -kInf, lmin < 0.0 ? -1.0 / lmin : kInf};
}

RootResult solve_phi_bisection(const SpectralConstraint& sc, double eps) {
  validate(sc);
  const Interval iv = feasible_interval(sc.lambda);
  double lower = iv.lo;
  double upper = iv.hi;
  bool lower_known = std::isfinite(lower);

  if (!std::isfinite(upper)) {
    double t = 1.0;
    for (int k = 0;; ++k) {
      const double f = phi_raw(sc, t);
      if (f == 0.0) return {t, 0, false};
      if (f < 0.0) {
        upper = t;
        break;
      }
      lower = t;
      lower_known = true;
      if (k >= kBracketMaxDoublings) {
        throw InfeasibleConstraintError("secular function stays positive; constraint is empty");
      }
      t *= 2.0;
    }
  }
  if (!lower_known) {
    double t = -1.0;
    for (int k = 0;; ++k) {
      const double f = phi_raw(sc, t);
      if (f == 0.0) return {t, 0, false};
      if (f > 0.0) {
        lower = t;
        break;
      }
      upper = t;
      if (k >= kBracketMaxDoublings) {
        throw InfeasibleConstraintError("secular function stays negative; constraint is empty");
      }
      t *= 2.0;
    }
  }

  int it = 0;
  while (upper - lower >= eps && it < kBisectionMaxIter) {
    const double mid = 0.5 * (lower + upper);
    if (mid <= lower || mid >= upper) break;
    ++it;
    if (phi_raw(sc, mid) > 0.0) {
      lower = mid;
    } else {
      upper = mid;
    }
  }
  return {0.5 * (lower + upper), it, false};
}

RootResult solve_phi_newton(const SpectralConstraint& sc, double eps, int max_iter) {
  validate(sc);
  const Interval iv = feasible_interval(sc.lambda);
  const double lmin = sc.lambda.minCoeff();
  const double lmax = sc.lambda.maxCoeff();

  double mu;
  if (lmin < 0.0 && lmax > 0.0) {
    mu = -(lmin + lmax) / (2.0 * lmin * lmax);
  } else if (std::isfinite(iv.lo)) {
    mu = iv.lo + 1.0;
  } else if (std::isfinite(iv.hi)) {
    mu = iv.hi - 1.0;
  } else {
    mu = 0.0;
  }

  // Bracket known to contain the root, tightened by every evaluation.
  double lower = iv.lo;
  double upper = iv.hi;
  double f = 0.0;
  double fp = 0.0;
  auto evaluate = [&] {
    f = phi_raw(sc, mu);
    fp = phi_prime_raw(sc, mu);
    if (f > 0.0) {
      lower = std::max(lower, mu);
    } else if (f < 0.0) {
      upper = std::min(upper, mu);
    }
  };
  auto converged = [&] { return f == 0.0 || (fp != 0.0 && f * f / std::abs(fp) < eps); };
  auto safeguard = [&](double cand) {
    if (std::isfinite(cand) && cand > lower && cand < upper) return cand;
    if (std::isfinite(lower) && std::isfinite(upper)) return 0.5 * (lower + upper);
    if (std::isfinite(lower)) return lower + std::max(1.0, 2.0 * std::abs(lower));
    return upper - std::max(1.0, 2.0 * std::abs(upper));
  };
  auto polish = [&] {
    for (int k = 0; k < 3 && f != 0.0 && fp < 0.0 && std::isfinite(f); ++k) {
      const double step = f / fp;
      const double cand = mu - step;
      if (!(cand > lower && cand < upper)) break;
      mu = cand;
      evaluate();
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mu)))
        break;
    }
  };

  evaluate();
  if (converged()) {
    polish();
    return {mu, 0, false};
  }
  for (int it = 1; it <= max_iter; ++it) {
    const double cand = (fp < 0.0 && std::isfinite(f)) ? mu - f / fp : std::nan("");
    mu = safeguard(cand);
    evaluate();
    if (converged()) {
      polish();
      return {mu, it, false};
    }
  }
  RootResult fallback = solve_phi_bisection(sc, eps);
  fallback.fell_back = true;
  fallback.iterations += max_iter;
  return fallback;
}

RootResult solve_phi(const SpectralConstraint& sc, RootMethod method, double eps) {
  return method == RootMethod::Newton ? solve_phi_newton(sc, eps) : solve_phi_bisection(sc, eps);
}

std::optional<PoleRoot> pole_candidate(const SpectralConstraint& sc) {
  validate(sc);
  const double lmin = sc.lambda.minCoeff();
  const double lmax = sc.lambda.maxCoeff();
  const double scale = 1.0 + sc.zeta_t.norm();

  // Limit of phi at mu_star when the singular numerators vanish; nullopt otherwise.
  auto limit_at = [&](double mu_star, double lam_end) -> std::optional<std::pair<double, Index>> {
    double total = -sc.c;
    Index first = -1;
    const double tol = 1e-12 * (scale + std::abs(mu_star) * sc.b_t.norm());
    for (Index k = 0; k < sc.lambda.size(); ++k) {
      const double lam = sc.lambda[k];
      if (std::abs(lam - lam_end) <= 1e-12 * std::max(std::abs(lmin), std::abs(lmax))) {
        if (std::abs(sc.zeta_t[k] + mu_star * sc.b_t[k]) > tol) return std::nullopt;
        // z_k is pinned at b_k / lambda_k plus a free component.
        total += -std::norm(sc.b_t[k]) / lam;
        if (first < 0) first = k;
        continue;
      }
      const Complex w = (sc.zeta_t[k] + mu_star * sc.b_t[k]) / (1.0 + mu_star * lam);
      total += lam * std::norm(w) - 2.0 * (std::conj(sc.b_t[k]) * w).real();
    }
    return std::make_pair(total, first);
  };

  if (lmax > 0.0) {
    const double mu_star = -1.0 / lmax;
    if (auto lim = limit_at(mu_star, lmax); lim && lim->first <= 0.0) {
      return PoleRoot{mu_star, lim->second, -lim->first / lmax};
    }
  }
  if (lmin < 0.0) {
    const double mu_star = -1.0 / lmin;
    if (auto lim = limit_at(mu_star, lmin); lim && lim->first >= 0.0) {
      return PoleRoot{mu_star, lim->second, -lim->first / lmin};
    }
  }
  return std::nullopt;
}

CubicRoots cubic_roots(const CubicInputs& in) {
  if (!(in.rho > 0.0) || !(in.a_norm_sq > 0.0) || !(in.d >= 0.0) || !std::isfinite(in.y) ||
      !std::isfinite(in.rho) || !std::isfinite(in.d)) {
    throw ConfigurationError("cubic multiplier inputs must be finite with rho, |a|^2 > 0, d >= 0");
  }
  if (!(in.rho > in.y * in.a_norm_sq)) {
    throw ConfigurationError("rho must exceed y*|a|^2 (got rho = " + std::to_string(in.rho) +
                             ", y*|a|^2 = " + std::to_string(in.y * in.a_norm_sq) + ")");
  }
  const double a2 = in.a_norm_sq;
  const double a4 = a2 * a2;
  const double rho = in.rho;

  CubicRoots out{};
  out.gamma3 = a4;
  out.gamma2 = 2.0 * rho * a2 + in.y * a4;
  out.gamma1 = 2.0 * in.y * rho * a2 + rho * rho;
  out.gamma0 = in.y * rho * rho - rho * rho * in.d;

  // Closed forms of Delta0, Delta1 for these coefficients avoid the cancellation in the
  // generic expressions: Delta0 = P^2, Delta1 = -2 P^3 - Q, disc = Q (Q + 4 P^3).
  const double p = rho * a2 - in.y * a4;
  const double q = 27.0 * rho * rho * a4 * a4 * in.d;
  out.delta0 = p * p;
  out.delta1 = -2.0 * p * p * p - q;
  out.discriminant = q * (q + 4.0 * p * p * p);

  // Either sign of the square root gives the same root set; take the one without
  // cancellation against delta1 < 0.
  const double cube = 0.5 * (out.delta1 - std::sqrt(std::max(0.0, out.discriminant)));
  const double c_root = std::cbrt(cube);
  const Complex iota[3] = {Complex(1.0, 0.0), Complex(-0.5, std::sqrt(3.0) / 2.0),
                           Complex(-0.5, -std::sqrt(3.0) / 2.0)};
  for (int k = 0; k < 3; ++k) {
    const Complex ic = iota[k] * c_root;
    out.roots[k] = -(out.gamma2 + ic + out.delta0 / ic) / (3.0 * out.gamma3);
  }
  return out;
}

double solve_cubic_mu(const CubicInputs& in) {
  const CubicRoots r = cubic_roots(in);
  double mu = r.roots[0].real();
  auto poly = [&](double t) { return ((r.gamma3 * t + r.gamma2) * t + r.gamma1) * t + r.gamma0; };
  auto dpoly = [&](double t) { return (3.0 * r.gamma3 * t + 2.0 * r.gamma2) * t + r.gamma1; };
  double val = poly(mu);
  for (int k = 0; k < 3 && val != 0.0; ++k) {
    const double slope = dpoly(mu);
    if (slope == 0.0) break;
    const double cand = mu - val / slope;
    const double cand_val = poly(cand);
    if (!(std::abs(cand_val) < std::abs(val))) break;
    mu = cand;
    val = cand_val;
  }
  return mu;
}

}  // namespace cadmm
