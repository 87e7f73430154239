#include "cadmm/rank1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cadmm/kernels.hpp"

namespace cadmm {

Rank1System::Rank1System(Mat a_s, RVec c, std::vector<ConstraintSense> senses)
    : a_s_(std::move(a_s)), c_(std::move(c)), senses_(std::move(senses)) {
  if (a_s_.rows() == 0 || a_s_.cols() == 0) throw InvalidInputError("A_s must be non-empty");
  if (c_.size() != a_s_.cols() || static_cast<Index>(senses_.size()) != a_s_.cols()) {
    throw InvalidInputError("one right-hand side and one sense per column of A_s");
  }
  if (!all_finite(a_s_) || !c_.allFinite()) throw InvalidInputError("non-finite rank-one data");
  a_norm_sq_ = a_s_.colwise().squaredNorm().transpose();
  if ((a_norm_sq_.array() <= 0.0).any()) throw InvalidInputError("A_s has a zero column");
}

Rank1System::Rank1System(Mat a_s, RVec c, ConstraintSense sense)
    : Rank1System(std::move(a_s), c, std::vector<ConstraintSense>(c.size(), sense)) {}

QcqpProblem Rank1System::to_problem(std::optional<Objective> objective, Field field) const {
  std::vector<QuadraticConstraint> cons;
  cons.reserve(static_cast<std::size_t>(m()));
  for (Index i = 0; i < m(); ++i) {
    cons.push_back(QuadraticConstraint::rank_one(a_s_.col(i), c_[i],
                                                 senses_[static_cast<std::size_t>(i)]));
  }
  if (objective) return QcqpProblem(std::move(*objective), std::move(cons), field);
  return QcqpProblem::feasibility(n(), std::move(cons), field);
}

CompressedState initial_compressed_state(const Rank1System& sys, const Vec& x0) {
  if (x0.size() != sys.n()) throw InvalidInputError("initial point has the wrong length");
  CompressedState st;
  st.x = x0;
  st.z_s = static_cast<double>(sys.m()) * x0;
  st.u_s = Vec::Zero(sys.n());
  st.alpha = Vec::Zero(sys.m());
  st.xi = Vec::Zero(sys.m());
  st.nu = Vec::Zero(sys.m());
  st.tau = RVec::Zero(sys.m());
  st.mu = RVec::Zero(sys.m());
  return st;
}

PriorSpec PriorSpec::hard_threshold(Index k) {
  if (k < 0) throw InvalidInputError("hard threshold cardinality must be non-negative");
  return {Kind::HardThreshold, k, 0.0};
}

PriorSpec PriorSpec::soft_threshold(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidInputError("soft threshold must be non-negative");
  return {Kind::SoftThreshold, 0, lambda};
}

Vec apply_prior(const Vec& v, const PriorSpec& prior) {
  switch (prior.kind) {
    case PriorSpec::Kind::None:
      return v;
    case PriorSpec::Kind::RealPart:
      return v.real().cast<Complex>();
    case PriorSpec::Kind::RealNonnegative:
      return v.real().cwiseMax(0.0).cast<Complex>();
    case PriorSpec::Kind::HardThreshold: {
      if (prior.k > v.size()) throw InvalidInputError("hard threshold k exceeds the length");
      std::vector<Index> order(static_cast<std::size_t>(v.size()));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return std::abs(v[a]) > std::abs(v[b]); });
      Vec out = Vec::Zero(v.size());
      for (Index j = 0; j < prior.k; ++j) {
        const Index k = order[static_cast<std::size_t>(j)];
        out[k] = v[k];
      }
      return out;
    }
    case PriorSpec::Kind::SoftThreshold: {
      Vec out(v.size());
      for (Index k = 0; k < v.size(); ++k) {
        const double r = std::abs(v[k]);
        out[k] = r > prior.lambda ? v[k] * ((r - prior.lambda) / r) : Complex(0.0, 0.0);
      }
      return out;
    }
  }
  return v;
}

CompressedEngine::CompressedEngine(Rank1System sys, std::optional<Objective> objective,
                                   double rho, PriorSpec prior)
    : sys_(std::move(sys)), objective_(std::move(objective)), rho_(rho), prior_(prior) {
  if (!(rho_ > 0.0) || !std::isfinite(rho_)) throw ConfigurationError("rho must be positive");
  if (objective_) {
    if (objective_->A0.dim() != sys_.n() || objective_->b0.size() != sys_.n()) {
      throw InvalidInputError("objective dimension disagrees with A_s");
    }
    const Index n = sys_.n();
    identity_objective_ =
        objective_->A0.matrix() == Mat::Identity(n, n) && objective_->b0.isZero(0.0);
    if (!identity_objective_) factor_.emplace(objective_->A0, sys_.m(), rho_);
  }
}

Vec CompressedEngine::x_update(const CompressedState& st) const {
  const double m = static_cast<double>(sys_.m());
  Vec x;
  if (!objective_) {
    x = (st.z_s + st.u_s) / m;
  } else if (identity_objective_) {
    x = (st.z_s + st.u_s) / (m + 1.0 / rho_);
  } else {
    x = factor_->solve(objective_->b0 + rho_ * (st.z_s + st.u_s));
  }
  return apply_prior(x, prior_);
}

void CompressedEngine::finish(CompressedState& st, const Vec& alpha_old) const {
  const double m = static_cast<double>(sys_.m());
  // u_i stays a multiple of a_i, so z_i - x = (alpha_i' - alpha_i) a_i / ||a_i||^2.
  st.consensus =
      ((st.alpha - alpha_old).cwiseAbs2().array() / sys_.a_norm_sq().array()).sum();
  Vec a_nu;
  kernels::matvec(sys_.A_s(), st.nu, a_nu);
  st.z_s = m * st.x - st.u_s + a_nu;
  st.u_s += st.z_s - m * st.x;
}

double CompressedEngine::step(CompressedState& st) const {
  const Vec previous = st.x;
  st.x = x_update(st);
  kernels::adjoint_matvec(sys_.A_s(), st.x, st.xi);
  const Vec alpha_old = st.alpha;
  kernels::rank1_scalar_update(st.xi, st.alpha, st.nu, st.tau, sys_.c(), sys_.senses(),
                               sys_.a_norm_sq());
  // Multiplier of each projection, canonical orientation (see solve_rank1_homogeneous).
  st.mu.resize(sys_.m());
  for (Index i = 0; i < sys_.m(); ++i) {
    const double r = std::abs(st.xi[i] - alpha_old[i]);
    const double target = r + st.tau[i];
    double mu = target > 0.0 && st.tau[i] != 0.0 ? (r / target - 1.0) / sys_.a_norm_sq()[i] : 0.0;
    if (sys_.senses()[static_cast<std::size_t>(i)].kind() == ConstraintSense::Kind::GreaterEqual) {
      mu = -mu;
    }
    st.mu[i] = mu;
  }
  finish(st, alpha_old);
  return (st.x - previous).norm();
}

double CompressedEngine::step_gaussian(CompressedState& st, const RVec& y, double rho) const {
  if (y.size() != sys_.m()) throw InvalidInputError("one measurement per column of A_s");
  const Vec previous = st.x;
  st.x = apply_prior((st.z_s + st.u_s) / static_cast<double>(sys_.m()), prior_);
  kernels::adjoint_matvec(sys_.A_s(), st.x, st.xi);
  const Vec alpha_old = st.alpha;
  kernels::gaussian_scalar_update(st.xi, st.alpha, st.nu, st.mu, y, rho, sys_.a_norm_sq());
  finish(st, alpha_old);
  return (st.x - previous).norm();
}

RVec scaled_violations(const Rank1System& sys, const Vec& xi) {
  if (xi.size() != sys.m()) throw InvalidInputError("xi length disagrees with A_s");
  RVec out(sys.m());
  for (Index i = 0; i < sys.m(); ++i) {
    const double r = std::norm(xi[i]) - sys.c()[i];
    out[i] = sense_violation(r, sys.senses()[static_cast<std::size_t>(i)]) /
             std::max(1.0, std::abs(sys.c()[i]));
  }
  return out;
}

double gaussian_rho(const Rank1System& sys, const RVec& y) {
  if (y.size() != sys.m()) throw InvalidInputError("one measurement per column of A_s");
  const double top = (y.array() * sys.a_norm_sq().array()).maxCoeff();
  // All-negative or zero y leaves the cubic precondition satisfied by any positive rho.
  return top > 0.0 ? 1.1 * top : 1.0;
}

}  // namespace cadmm
