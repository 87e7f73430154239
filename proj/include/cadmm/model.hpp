#pragma once

#include <optional>
#include <vector>

#include "cadmm/linalg.hpp"

namespace cadmm {

/// Dense Hermitian matrix. Construction symmetrizes the input as (A + A^H) / 2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const Mat& a);

  static HermitianMatrix zero(Index n);
  static HermitianMatrix identity(Index n);

  const Mat& matrix() const { return a_; }
  Index dim() const { return a_.rows(); }

 private:
  Mat a_;
};

class ConstraintSense {
 public:
  enum class Kind { LessEqual, GreaterEqual, Equal, Bounded };

  static ConstraintSense less_equal() { return ConstraintSense(Kind::LessEqual, 0.0); }
  static ConstraintSense greater_equal() { return ConstraintSense(Kind::GreaterEqual, 0.0); }
  static ConstraintSense equal() { return ConstraintSense(Kind::Equal, 0.0); }
  /// Two-sided band c - eps <= q(x) <= c + eps; eps must be positive.
  static ConstraintSense bounded(double eps);

  Kind kind() const { return kind_; }
  double eps() const { return eps_; }

  bool operator==(const ConstraintSense&) const = default;

 private:
  ConstraintSense(Kind k, double eps) : kind_(k), eps_(eps) {}
  Kind kind_;
  double eps_;
};

/// One constraint x^H A x - 2 Re{b^H x} (sense) c.
class QuadraticConstraint {
 public:
  QuadraticConstraint(HermitianMatrix a, Vec b, double c, ConstraintSense sense);

  /// |a^H x|^2 (sense) c, stored with A = a a^H and b = 0.
  static QuadraticConstraint rank_one(Vec a, double c, ConstraintSense sense);

  const HermitianMatrix& A() const { return a_; }
  const Vec& b() const { return b_; }
  double c() const { return c_; }
  ConstraintSense sense() const { return sense_; }
  const std::optional<Vec>& rank1() const { return rank1_; }
  Index dim() const { return b_.size(); }

 private:
  HermitianMatrix a_;
  Vec b_;
  double c_;
  ConstraintSense sense_;
  std::optional<Vec> rank1_;
};

enum class Field { Real, Complex };

struct Objective {
  HermitianMatrix A0;
  Vec b0;
};

/// minimize x^H A0 x - 2 Re{b0^H x} subject to m quadratic constraints.
class QcqpProblem {
 public:
  QcqpProblem(Objective objective, std::vector<QuadraticConstraint> constraints,
              Field field = Field::Complex);

  /// A problem with a zero objective; only the feasibility phase runs.
  static QcqpProblem feasibility(Index n, std::vector<QuadraticConstraint> constraints,
                                 Field field = Field::Complex);

  Index n() const { return objective_.b0.size(); }
  Index m() const { return static_cast<Index>(constraints_.size()); }
  const Objective& objective() const { return objective_; }
  const std::vector<QuadraticConstraint>& constraints() const { return constraints_; }
  Field field() const { return field_; }
  bool has_objective() const;

  /// Same problem with every GreaterEqual constraint rewritten as LessEqual on (-A, -b, -c).
  QcqpProblem canonical() const;

 private:
  Objective objective_;
  std::vector<QuadraticConstraint> constraints_;
  Field field_;
};

/// GreaterEqual -> LessEqual with negated data; other senses returned unchanged.
/// The rank-1 tag is dropped on negation since -a a^H is not of that form.
QuadraticConstraint canonicalize(const QuadraticConstraint& q);

/// Signed residual x^H A x - 2 Re{b^H x} - c.
double eval_constraint(const QuadraticConstraint& q, const Vec& x);

/// Amount by which a signed residual violates the sense (0 when feasible).
double sense_violation(double residual, ConstraintSense sense);

/// Sense-aware amount by which x violates q (0 when feasible).
double violation(const QuadraticConstraint& q, const Vec& x);

/// violation / max(1, |c|); feasibility is declared when this is <= kFeasibilityTol.
double scaled_violation(const QuadraticConstraint& q, const Vec& x);

inline constexpr double kFeasibilityTol = 1e-6;

double max_violation(const QcqpProblem& p, const Vec& x);
bool is_feasible(const QcqpProblem& p, const Vec& x, double tol = kFeasibilityTol);
/// Number of constraints whose scaled violation exceeds tol.
Index count_violations(const QcqpProblem& p, const Vec& x, double tol = kFeasibilityTol);

double objective_value(const QcqpProblem& p, const Vec& x);

struct KktResidual {
  double stationarity = 0.0;
  double complementarity = 0.0;
  double dual_feas = 0.0;
  double primal_feas = 0.0;
};

/// KKT residuals at (x, mu). Multipliers refer to the canonical orientation of each
/// constraint (GreaterEqual constraints negated), so mu >= 0 is the inequality sign
/// condition throughout. Equal and Bounded multipliers carry no sign requirement.
KktResidual kkt_residual(const QcqpProblem& p, const Vec& x, const std::vector<double>& mu);

struct SolveReport {
  Vec x;
  Index iterations_phase1 = 0;
  Index iterations_phase2 = 0;
  Index restarts = 0;
  double consensus_residual = 0.0;
  double successive_diff = 0.0;
  double kkt_stationarity = 0.0;
  KktResidual kkt;
  double max_violation = 0.0;
  Index violations = 0;
  double objective = 0.0;
  double wall_time = 0.0;
  bool feasible = false;
  bool probably_infeasible = false;
  std::optional<double> mse_db;
  std::vector<double> multipliers;
};

}  // namespace cadmm
