#pragma once

#include <optional>
#include <vector>

#include "cadmm/admm.hpp"
#include "cadmm/model.hpp"

// O(m + n) consensus iteration for families of homogeneous rank-one constraints
// |a_i^H x|^2 (sense) c_i. Only the sums z_s = sum z_i, u_s = sum u_i and the scalars
// alpha_i = a_i^H u_i are stored.

namespace cadmm {

/// Columns a_i of A_s with their right-hand sides and senses.
class Rank1System {
 public:
  Rank1System(Mat a_s, RVec c, std::vector<ConstraintSense> senses);
  Rank1System(Mat a_s, RVec c, ConstraintSense sense);

  Index n() const { return a_s_.rows(); }
  Index m() const { return a_s_.cols(); }
  const Mat& A_s() const { return a_s_; }
  const RVec& c() const { return c_; }
  const std::vector<ConstraintSense>& senses() const { return senses_; }
  const RVec& a_norm_sq() const { return a_norm_sq_; }

  /// Same constraints as a general problem, one rank-one QuadraticConstraint per column.
  QcqpProblem to_problem(std::optional<Objective> objective, Field field) const;

 private:
  Mat a_s_;
  RVec c_;
  std::vector<ConstraintSense> senses_;
  RVec a_norm_sq_;
};

struct CompressedState {
  Vec x;
  Vec z_s;
  Vec u_s;
  Vec alpha;
  Vec xi;
  Vec nu;
  RVec tau;
  RVec mu;  // Gaussian variant only
  double consensus = 0.0;  // sum_i ||z_i - x||^2 of the last step
};

/// z_s = m x0, u_s = 0, alpha = 0.
CompressedState initial_compressed_state(const Rank1System& sys, const Vec& x0);

struct PriorSpec {
  enum class Kind { None, RealPart, RealNonnegative, HardThreshold, SoftThreshold };
  Kind kind = Kind::None;
  Index k = 0;
  double lambda = 0.0;

  static PriorSpec none() { return {}; }
  static PriorSpec real_part() { return {Kind::RealPart, 0, 0.0}; }
  static PriorSpec real_nonnegative() { return {Kind::RealNonnegative, 0, 0.0}; }
  static PriorSpec hard_threshold(Index k);
  static PriorSpec soft_threshold(double lambda);
};

Vec apply_prior(const Vec& v, const PriorSpec& prior);

class CompressedEngine {
 public:
  /// Without an objective the x-update is (z_s + u_s) / m and rho is unused.
  explicit CompressedEngine(Rank1System sys, std::optional<Objective> objective = std::nullopt,
                            double rho = 1.0, PriorSpec prior = {});

  const Rank1System& system() const { return sys_; }
  double rho() const { return rho_; }

  /// One pass of x, xi, nu, z_s, u_s, alpha in that order; returns ||x_new - x_old||.
  double step(CompressedState& st) const;

  /// One iteration of the noisy-magnitude variant against measurements y (the system's c
  /// and senses are ignored); requires rho > y_i ||a_i||^2 for every i.
  double step_gaussian(CompressedState& st, const RVec& y, double rho) const;

 private:
  Vec x_update(const CompressedState& st) const;
  void finish(CompressedState& st, const Vec& alpha_old) const;

  Rank1System sys_;
  std::optional<Objective> objective_;
  bool identity_objective_ = false;
  std::optional<FactorCache> factor_;
  double rho_;
  PriorSpec prior_;
};

/// Violations of |a_i^H x|^2 (sense) c_i from xi = A_s^H x, scaled by max(1, |c_i|).
RVec scaled_violations(const Rank1System& sys, const Vec& xi);

/// The rho rule for the noisy-magnitude variant: 1.1 max_i y_i ||a_i||^2, kept positive.
double gaussian_rho(const Rank1System& sys, const RVec& y);

}  // namespace cadmm
