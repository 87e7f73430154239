#include "cadmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cadmm {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInputError(what);
}

bool is_real(const Mat& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }
bool is_real(const Vec& v) { return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

HermitianMatrix::HermitianMatrix(const Mat& a) {
  require(a.rows() == a.cols(), "Hermitian matrix must be square, got " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  require(a.rows() > 0, "Hermitian matrix must be non-empty");
  require(a.allFinite(), "Hermitian matrix has non-finite entries");
  a_ = (a + a.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::zero(Index n) { return HermitianMatrix(Mat::Zero(n, n)); }

HermitianMatrix HermitianMatrix::identity(Index n) {
  return HermitianMatrix(Mat::Identity(n, n));
}

ConstraintSense ConstraintSense::bounded(double eps) {
  require(std::isfinite(eps) && eps > 0.0, "bounded sense requires eps > 0");
  return ConstraintSense(Kind::Bounded, eps);
}

QuadraticConstraint::QuadraticConstraint(HermitianMatrix a, Vec b, double c,
                                         ConstraintSense sense)
    : a_(std::move(a)), b_(std::move(b)), c_(c), sense_(sense) {
  require(a_.dim() == b_.size(), "constraint A is " + std::to_string(a_.dim()) +
                                     "-dimensional but b has length " +
                                     std::to_string(b_.size()));
  require(b_.allFinite() && std::isfinite(c_), "constraint data must be finite");
}

QuadraticConstraint QuadraticConstraint::rank_one(Vec a, double c, ConstraintSense sense) {
  require(a.size() > 0 && a.allFinite(), "rank-one vector must be finite and non-empty");
  require(a.squaredNorm() > 0.0, "rank-one vector must be non-zero");
  QuadraticConstraint q(HermitianMatrix(a * a.adjoint()), Vec::Zero(a.size()), c, sense);
  q.rank1_ = std::move(a);
  return q;
}

QcqpProblem::QcqpProblem(Objective objective, std::vector<QuadraticConstraint> constraints,
                         Field field)
    : objective_(std::move(objective)), constraints_(std::move(constraints)), field_(field) {
  const Index dim = objective_.b0.size();
  require(dim > 0, "problem dimension must be positive");
  require(objective_.A0.dim() == dim, "objective A0 and b0 dimensions disagree");
  require(objective_.b0.allFinite(), "objective b0 must be finite");
  require(!constraints_.empty(), "problem needs at least one constraint");
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    require(constraints_[i].dim() == dim,
            "constraint " + std::to_string(i) + " has dimension " +
                std::to_string(constraints_[i].dim()) + ", expected " + std::to_string(dim));
  }
  if (field_ == Field::Real) {
    require(is_real(objective_.A0.matrix()) && is_real(objective_.b0),
            "real-field problem has complex objective data");
    for (const auto& q : constraints_) {
      require(is_real(q.A().matrix()) && is_real(q.b()),
              "real-field problem has complex constraint data");
    }
  }
}

QcqpProblem QcqpProblem::feasibility(Index n, std::vector<QuadraticConstraint> constraints,
                                     Field field) {
  return QcqpProblem(Objective{HermitianMatrix::zero(n), Vec::Zero(n)}, std::move(constraints),
                     field);
}

bool QcqpProblem::has_objective() const {
  return objective_.A0.matrix().cwiseAbs().maxCoeff() > 0.0 ||
         objective_.b0.cwiseAbs().maxCoeff() > 0.0;
}

QcqpProblem QcqpProblem::canonical() const {
  std::vector<QuadraticConstraint> out;
  out.reserve(constraints_.size());
  for (const auto& q : constraints_) out.push_back(canonicalize(q));
  return QcqpProblem(objective_, std::move(out), field_);
}

QuadraticConstraint canonicalize(const QuadraticConstraint& q) {
  if (q.sense().kind() != ConstraintSense::Kind::GreaterEqual) return q;
  return QuadraticConstraint(HermitianMatrix(-q.A().matrix()), -q.b(), -q.c(),
                             ConstraintSense::less_equal());
}

double eval_constraint(const QuadraticConstraint& q, const Vec& x) {
  if (x.size() != q.dim()) {
    throw InvalidInputError("point has length " + std::to_string(x.size()) +
                            ", constraint expects " + std::to_string(q.dim()));
  }
  double quad;
  if (q.rank1()) {
    quad = std::norm(q.rank1()->dot(x));
  } else {
    quad = x.dot(q.A().matrix() * x).real();
  }
  return quad - 2.0 * q.b().dot(x).real() - q.c();
}

double sense_violation(double residual, ConstraintSense sense) {
  switch (sense.kind()) {
    case ConstraintSense::Kind::LessEqual:
      return std::max(0.0, residual);
    case ConstraintSense::Kind::GreaterEqual:
      return std::max(0.0, -residual);
    case ConstraintSense::Kind::Equal:
      return std::abs(residual);
    case ConstraintSense::Kind::Bounded:
      return std::max(0.0, std::abs(residual) - sense.eps());
  }
  return 0.0;
}

double violation(const QuadraticConstraint& q, const Vec& x) {
  return sense_violation(eval_constraint(q, x), q.sense());
}

double scaled_violation(const QuadraticConstraint& q, const Vec& x) {
  return violation(q, x) / std::max(1.0, std::abs(q.c()));
}

double max_violation(const QcqpProblem& p, const Vec& x) {
  double worst = 0.0;
  for (const auto& q : p.constraints()) worst = std::max(worst, scaled_violation(q, x));
  return worst;
}

bool is_feasible(const QcqpProblem& p, const Vec& x, double tol) {
  return max_violation(p, x) <= tol;
}

Index count_violations(const QcqpProblem& p, const Vec& x, double tol) {
  Index count = 0;
  for (const auto& q : p.constraints()) count += scaled_violation(q, x) > tol ? 1 : 0;
  return count;
}

double objective_value(const QcqpProblem& p, const Vec& x) {
  require(x.size() == p.n(), "point dimension mismatch");
  const auto& obj = p.objective();
  return x.dot(obj.A0.matrix() * x).real() - 2.0 * obj.b0.dot(x).real();
}

KktResidual kkt_residual(const QcqpProblem& p, const Vec& x, const std::vector<double>& mu) {
  require(static_cast<Index>(mu.size()) == p.m(), "need one multiplier per constraint");
  require(x.size() == p.n(), "point dimension mismatch");
  KktResidual out;
  Vec grad = p.objective().A0.matrix() * x - p.objective().b0;
  for (Index i = 0; i < p.m(); ++i) {
    const QuadraticConstraint q = canonicalize(p.constraints()[i]);
    const double m_i = mu[i];
    const double r = eval_constraint(q, x);
    if (m_i != 0.0) grad += m_i * (q.A().matrix() * x - q.b());

    switch (q.sense().kind()) {
      case ConstraintSense::Kind::Bounded:
        out.complementarity =
            std::max(out.complementarity, std::abs(m_i) * std::abs(std::abs(r) - q.sense().eps()));
        break;
      case ConstraintSense::Kind::LessEqual:
        out.dual_feas = std::max(out.dual_feas, std::max(0.0, -m_i));
        [[fallthrough]];
      default:
        out.complementarity = std::max(out.complementarity, std::abs(m_i * r));
    }
    out.primal_feas = std::max(out.primal_feas, scaled_violation(q, x));
  }
  out.stationarity = grad.norm();
  return out;
}

}  // namespace cadmm
