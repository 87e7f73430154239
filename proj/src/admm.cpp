#include "cadmm/admm.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "cadmm/kernels.hpp"

namespace cadmm {

void SolverConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigurationError("rho must be positive");
  if (max_iter_phase1 < 1 || max_iter_phase2 < 0) {
    throw ConfigurationError("iteration caps must be positive");
  }
  if (!(tol_successive > 0.0) || !(tol_consensus > 0.0) || !(feas_tol > 0.0)) {
    throw ConfigurationError("tolerances must be positive");
  }
  if (restarts_phase1 < 0) throw ConfigurationError("restart count must be non-negative");
}

FactorCache::FactorCache(const HermitianMatrix& a0, Index m, double rho) : rho_(rho) {
  const Index n = a0.dim();
  llt_.compute(a0.matrix() + (static_cast<double>(m) * rho) * Mat::Identity(n, n));
  if (llt_.info() != Eigen::Success) {
    throw ConfigurationError("A0 + m*rho*I is not positive definite for rho = " +
                             std::to_string(rho) + "; increase rho");
  }
}

ConstraintProjector::ConstraintProjector(const QuadraticConstraint& q)
    : data_(q.rank1() ? std::variant<Rank1, General>(Rank1{*q.rank1(), q.c(), q.sense()})
                      : std::variant<Rank1, General>(General{
                            EigenCache(canonicalize(q).A()), canonicalize(q).b(),
                            canonicalize(q).c(), canonicalize(q).sense()})) {}

Qcqp1Solution ConstraintProjector::project(const Vec& zeta, RootMethod rf) const {
  if (const auto* r1 = std::get_if<Rank1>(&data_)) {
    return solve_rank1_homogeneous(r1->a, r1->c, zeta, r1->sense);
  }
  const auto& g = std::get<General>(data_);
  return solve_general(g.cache, g.b, g.c, zeta, g.sense, rf);
}

Vec x_update(const QcqpProblem& p, const ConsensusState& s, const FactorCache& cache) {
  const Vec rhs = p.objective().b0 + cache.rho() * kernels::consensus_sum(s.z, s.u);
  return cache.solve(rhs);
}

Vec x_update_feasibility(const ConsensusState& s) {
  if (s.z.empty()) throw InvalidInputError("feasibility update needs at least one constraint");
  return kernels::consensus_sum(s.z, s.u) / static_cast<double>(s.z.size());
}

ZUUpdate z_u_update(const ConstraintProjector& proj, const Vec& x, const Vec& u_i,
                    RootMethod rf) {
  Qcqp1Solution sol = proj.project(x - u_i, rf);
  ZUUpdate out{std::move(sol.z), Vec(), sol.mu};
  out.u = u_i + out.z - x;
  return out;
}

double consensus_residual(const ConsensusState& s) {
  double total = 0.0;
  for (const Vec& z : s.z) total += (z - s.x).squaredNorm();
  return total;
}

Vec random_normal(Index n, Field field, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  if (field == Field::Real) {
    for (Index k = 0; k < n; ++k) v[k] = Complex(normal(rng), 0.0);
  } else {
    const double s = std::sqrt(0.5);
    for (Index k = 0; k < n; ++k) {
      const double re = normal(rng);
      const double im = normal(rng);
      v[k] = Complex(s * re, s * im);
    }
  }
  return v;
}

ConsensusAdmm::ConsensusAdmm(const QcqpProblem& p, const SolverConfig& cfg)
    : problem_(p), cfg_(cfg) {
  cfg_.validate();
  projectors_.reserve(static_cast<std::size_t>(p.m()));
  for (const auto& q : p.constraints()) projectors_.emplace_back(q);
  const auto m = static_cast<std::size_t>(p.m());
  state_.x = Vec::Zero(p.n());
  state_.z.assign(m, Vec::Zero(p.n()));
  state_.u.assign(m, Vec::Zero(p.n()));
  state_.mu.assign(m, 0.0);
}

void ConsensusAdmm::initialize_random(std::mt19937_64& rng) {
  state_.x = random_normal(problem_.n(), problem_.field(), rng);
  for (auto& z : state_.z) z = random_normal(problem_.n(), problem_.field(), rng);
  for (auto& u : state_.u) u.setZero();
  std::fill(state_.mu.begin(), state_.mu.end(), 0.0);
}

void ConsensusAdmm::set_state(ConsensusState s) {
  const auto m = static_cast<std::size_t>(problem_.m());
  if (s.x.size() != problem_.n() || s.z.size() != m || s.u.size() != m) {
    throw InvalidInputError("consensus state does not match the problem dimensions");
  }
  if (s.mu.size() != m) s.mu.assign(m, 0.0);
  state_ = std::move(s);
}

void ConsensusAdmm::update_constraints() {
  const RootMethod rf = cfg_.root_method;
  kernels::parallel_for(problem_.m(), [&](Index i) {
    const auto k = static_cast<std::size_t>(i);
    ZUUpdate upd = z_u_update(projectors_[k], state_.x, state_.u[k], rf);
    state_.z[k] = std::move(upd.z);
    state_.u[k] = std::move(upd.u);
    state_.mu[k] = upd.mu;
  });
}

double ConsensusAdmm::feasibility_step() {
  kernels::ThreadLimit threads(cfg_.threads);
  const Vec previous = state_.x;
  state_.x = x_update_feasibility(state_);
  update_constraints();
  return (state_.x - previous).norm();
}

double ConsensusAdmm::optimization_step() {
  kernels::ThreadLimit threads(cfg_.threads);
  if (!factor_) factor_.emplace(problem_.objective().A0, problem_.m(), cfg_.rho);
  const Vec previous = state_.x;
  state_.x = x_update(problem_, state_, *factor_);
  update_constraints();
  return (state_.x - previous).norm();
}

SolveReport run(const QcqpProblem& p, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ConsensusAdmm engine(p, cfg);
  std::mt19937_64 rng(cfg.seed);
  const auto m = static_cast<std::size_t>(p.m());

  SolveReport report;
  Index iteration = 0;
  double successive = 0.0;
  auto emit = [&](int phase, double consensus) {
    if (!cfg.trace) return;
    cfg.trace({iteration, phase, consensus, successive, objective_value(p, engine.state().x)});
  };

  bool found = false;
  for (Index attempt = 0; attempt <= cfg.restarts_phase1 && !found; ++attempt) {
    if (attempt > 0) ++report.restarts;
    engine.initialize_random(rng);
    for (Index it = 0; it < cfg.max_iter_phase1; ++it) {
      successive = engine.feasibility_step();
      ++iteration;
      ++report.iterations_phase1;
      if (cfg.trace) emit(1, consensus_residual(engine.state()));
      if (max_violation(p, engine.state().x) <= cfg.feas_tol) {
        found = true;
        break;
      }
    }
  }

  Vec x_out = engine.state().x;
  std::vector<double> mu_out(m, 0.0);
  if (found && p.has_objective()) {
    Vec best_x = x_out;
    double best_obj = objective_value(p, best_x);
    std::vector<double> best_mu = mu_out;
    auto scaled_mu = [&] {
      std::vector<double> mu(engine.state().mu);
      for (double& v : mu) v *= cfg.rho;
      return mu;
    };

    for (Index it = 0; it < cfg.max_iter_phase2; ++it) {
      successive = engine.optimization_step();
      ++iteration;
      ++report.iterations_phase2;
      const ConsensusState& st = engine.state();
      const double consensus = consensus_residual(st);
      emit(2, consensus);
      if (max_violation(p, st.x) <= cfg.feas_tol) {
        const double obj = objective_value(p, st.x);
        if (obj <= best_obj) {
          best_obj = obj;
          best_x = st.x;
          best_mu = scaled_mu();
        }
      }
      if (successive < cfg.tol_successive && consensus < cfg.tol_consensus) break;
    }
    // An infeasible final iterate gets rho-free steps from its own state; the point they
    // reach replaces the best feasible iterate only if its objective is lower.
    bool keep_last = max_violation(p, engine.state().x) <= cfg.feas_tol;
    if (!keep_last) {
      for (Index it = 0; it < cfg.max_iter_phase1; ++it) {
        successive = engine.feasibility_step();
        ++iteration;
        ++report.iterations_phase2;
        emit(3, consensus_residual(engine.state()));
        if (max_violation(p, engine.state().x) <= cfg.feas_tol) {
          keep_last = objective_value(p, engine.state().x) < best_obj;
          break;
        }
      }
    }
    // The last iterate is kept when feasible; otherwise the best feasible one seen.
    if (keep_last) {
      x_out = engine.state().x;
      mu_out = scaled_mu();
    } else {
      x_out = best_x;
      mu_out = best_mu;
    }
  }

  report.x = x_out;
  report.multipliers = mu_out;
  report.consensus_residual = consensus_residual(engine.state());
  report.successive_diff = successive;
  report.kkt = kkt_residual(p, x_out, mu_out);
  report.kkt_stationarity = report.kkt.stationarity;
  report.max_violation = max_violation(p, x_out);
  report.violations = count_violations(p, x_out, cfg.feas_tol);
  report.objective = objective_value(p, x_out);
  report.feasible = report.max_violation <= cfg.feas_tol;
  report.probably_infeasible = !found;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cadmm
