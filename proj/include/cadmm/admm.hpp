#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "cadmm/model.hpp"
#include "cadmm/qcqp1.hpp"

namespace cadmm {

/// One line of the per-iteration trace. Iteration indices are global across phases.
struct TraceRow {
  Index iteration = 0;
  int phase = 1;  // 1 feasibility search, 2 main ADMM, 3 restoration after a failed phase 2
  double consensus = 0.0;
  double successive = 0.0;
  double objective = 0.0;
};

using TraceSink = std::function<void(const TraceRow&)>;

struct SolverConfig {
  double rho = 1.0;
  Index max_iter_phase1 = 1000;  // per initialization
  Index max_iter_phase2 = 10000;
  double tol_successive = 1e-8;
  double tol_consensus = 1e-6;
  Index restarts_phase1 = 10;  // re-initializations after the first attempt
  RootMethod root_method = RootMethod::Bisection;
  std::uint64_t seed = 0;
  int threads = 1;
  double feas_tol = kFeasibilityTol;
  TraceSink trace;

  void validate() const;
};

/// Full consensus state: x, one local copy z_i and one scaled dual u_i per constraint, plus
/// the multipliers of the most recent z-updates.
struct ConsensusState {
  Vec x;
  std::vector<Vec> z;
  std::vector<Vec> u;
  std::vector<double> mu;
};

/// Cholesky factorization of A0 + m rho I, built once per phase.
class FactorCache {
 public:
  FactorCache(const HermitianMatrix& a0, Index m, double rho);
  Vec solve(const Vec& rhs) const { return llt_.solve(rhs); }
  double rho() const { return rho_; }

 private:
  Eigen::LLT<Mat> llt_;
  double rho_;
};

/// Exact projection onto one constraint, with whatever is cached for it: the rank-one vector
/// (closed form, original sense) or the eigendecomposition of the canonicalized matrix.
class ConstraintProjector {
 public:
  explicit ConstraintProjector(const QuadraticConstraint& q);

  Qcqp1Solution project(const Vec& zeta, RootMethod rf) const;

 private:
  struct Rank1 {
    Vec a;
    double c;
    ConstraintSense sense;
  };
  struct General {
    EigenCache cache;
    Vec b;
    double c;
    ConstraintSense sense;
  };
  std::variant<Rank1, General> data_;
};

/// x <- (A0 + m rho I)^{-1} (b0 + rho sum_i (z_i + u_i)).
Vec x_update(const QcqpProblem& p, const ConsensusState& s, const FactorCache& cache);

/// x <- (1/m) sum_i (z_i + u_i), the rho-free feasibility update.
Vec x_update_feasibility(const ConsensusState& s);

struct ZUUpdate {
  Vec z;
  Vec u;
  double mu;
};

/// z_i <- projection of x - u_i onto constraint i;  u_i <- u_i + z_i - x.
ZUUpdate z_u_update(const ConstraintProjector& proj, const Vec& x, const Vec& u_i,
                    RootMethod rf);

/// Sum_i ||z_i - x||^2.
double consensus_residual(const ConsensusState& s);

/// Stepping engine over a fixed problem; run() drives it through both phases.
class ConsensusAdmm {
 public:
  ConsensusAdmm(const QcqpProblem& p, const SolverConfig& cfg);

  /// x and each z_i drawn i.i.d. standard (complex) normal, u_i = 0.
  void initialize_random(std::mt19937_64& rng);
  void set_state(ConsensusState s);
  const ConsensusState& state() const { return state_; }

  /// One rho-free iteration; returns ||x_new - x_old||.
  double feasibility_step();
  /// One iteration of the full update with the objective and rho; returns ||x_new - x_old||.
  double optimization_step();

  const QcqpProblem& problem() const { return problem_; }

 private:
  void update_constraints();

  QcqpProblem problem_;
  SolverConfig cfg_;
  std::vector<ConstraintProjector> projectors_;
  std::optional<FactorCache> factor_;
  ConsensusState state_;
};

/// Two-phase solve: rho-free feasibility search with random restarts, then the
/// objective-aware iteration warm-started at the feasible point.
SolveReport run(const QcqpProblem& p, const SolverConfig& cfg);

/// Standard (complex) normal vector; real normal when field is Real.
Vec random_normal(Index n, Field field, std::mt19937_64& rng);

}  // namespace cadmm
