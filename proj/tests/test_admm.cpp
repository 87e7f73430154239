#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cadmm/admm.hpp"
#include "oracles/oracles.hpp"

using namespace cadmm;

namespace {

ConsensusState random_state(Index n, Index m, std::mt19937_64& rng) {
  ConsensusState s;
  s.x = oracle::randn(n, rng);
  for (Index i = 0; i < m; ++i) {
    s.z.push_back(oracle::randn(n, rng));
    s.u.push_back(oracle::randn(n, rng) * 0.3);
  }
  s.mu.assign(static_cast<std::size_t>(m), 0.0);
  return s;
}

std::vector<QuadraticConstraint> ball(Index n, double c, ConstraintSense sense) {
  return {QuadraticConstraint(HermitianMatrix::identity(n), Vec::Zero(n), c, sense)};
}

QcqpProblem projection_onto_ball() {
  // min ||x - (3, 0)||^2 - 9 over ||x||^2 <= 1; optimum (1, 0) with objective -5.
  Vec b0 = Vec::Zero(2);
  b0[0] = 3.0;
  return QcqpProblem({HermitianMatrix::identity(2), b0}, ball(2, 1.0, ConstraintSense::less_equal()));
}

}  // namespace

TEST(XUpdate, SolvesNormalEquations) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const Index n = 2 + t % 5, m = 1 + t % 7;
    const Mat g = oracle::randn(n, n, rng);
    const Mat a0 = g * g.adjoint();
    const Vec b0 = oracle::randn(n, rng);
    std::vector<QuadraticConstraint> cons;
    for (Index i = 0; i < m; ++i) {
      cons.push_back(QuadraticConstraint::rank_one(oracle::randn(n, rng), 1.0,
                                                   ConstraintSense::less_equal()));
    }
    const QcqpProblem p({HermitianMatrix(a0), b0}, cons);
    const double rho = 0.5 + t;
    const ConsensusState s = random_state(n, m, rng);
    const Vec x = x_update(p, s, FactorCache(p.objective().A0, m, rho));
    Vec sum = Vec::Zero(n);
    for (Index i = 0; i < m; ++i) sum += s.z[i] + s.u[i];
    const Vec lhs = (a0 + m * rho * Mat::Identity(n, n)) * x;
    EXPECT_LT((lhs - (b0 + rho * sum)).norm(), 1e-10 * (b0 + rho * sum).norm());
  }
}

TEST(XUpdate, IdentityObjectiveClosedForm) {
  std::mt19937_64 rng(2);
  const Index n = 4, m = 6;
  const double rho = 1.7;
  const Vec b0 = oracle::randn(n, rng);
  const QcqpProblem p({HermitianMatrix::identity(n), b0},
                      std::vector<QuadraticConstraint>(
                          m, QuadraticConstraint::rank_one(Vec::Ones(n), 1.0,
                                                           ConstraintSense::less_equal())));
  const ConsensusState s = random_state(n, m, rng);
  Vec sum = Vec::Zero(n);
  for (Index i = 0; i < m; ++i) sum += s.z[i] + s.u[i];
  const Vec expect = (b0 + rho * sum) / (1.0 + m * rho);
  EXPECT_LT((x_update(p, s, FactorCache(p.objective().A0, m, rho)) - expect).norm(), 1e-13);
  EXPECT_LT((x_update_feasibility(s) - sum / static_cast<double>(m)).norm(), 1e-13);
}

TEST(XUpdate, FactorCacheRejectsIndefiniteSystem) {
  const HermitianMatrix a0(-5.0 * Mat::Identity(3, 3));
  EXPECT_THROW(FactorCache(a0, 2, 1.0), ConfigurationError);
  EXPECT_NO_THROW(FactorCache(a0, 2, 3.0));
}

TEST(ZUUpdate, DualUpdateIsExact) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Index n = 3;
    const auto q = QuadraticConstraint(HermitianMatrix(oracle::random_hermitian(n, rng)),
                                       oracle::randn(n, rng), 0.5, ConstraintSense::less_equal());
    const ConstraintProjector proj(q);
    const Vec x = oracle::randn(n, rng), u = oracle::randn(n, rng);
    const ZUUpdate upd = z_u_update(proj, x, u, RootMethod::Bisection);
    const Vec expect = u + upd.z - x;
    EXPECT_EQ(upd.u, expect);
    EXPECT_LE(scaled_violation(q, upd.z), 1e-9);
  }
}

TEST(ZUUpdate, ProjectorMatchesDirectSolvers) {
  std::mt19937_64 rng(4);
  const Vec a = oracle::randn(4, rng);
  const Vec zeta = oracle::randn(4, rng) * 3.0;
  const auto r1 = QuadraticConstraint::rank_one(a, 0.7, ConstraintSense::greater_equal());
  const auto viaproj = ConstraintProjector(r1).project(zeta, RootMethod::Bisection);
  const auto direct = solve_rank1_homogeneous(a, 0.7, zeta, ConstraintSense::greater_equal());
  EXPECT_EQ(viaproj.z, direct.z);
  // The general path on the same data, with the GE canonicalized, reaches the same point.
  const QuadraticConstraint general(HermitianMatrix(a * a.adjoint()), Vec::Zero(4), 0.7,
                                    ConstraintSense::greater_equal());
  const auto viagen = ConstraintProjector(general).project(zeta, RootMethod::Bisection);
  EXPECT_LT((viagen.z - direct.z).norm(), 1e-8 * (1.0 + direct.z.norm()));
  EXPECT_NEAR(viagen.mu, direct.mu, 1e-8 * (1.0 + std::abs(direct.mu)));
}

TEST(Consensus, ResidualDefinition) {
  std::mt19937_64 rng(5);
  const ConsensusState s = random_state(3, 4, rng);
  double total = 0.0;
  for (const Vec& z : s.z) total += (z - s.x).squaredNorm();
  EXPECT_DOUBLE_EQ(consensus_residual(s), total);
}

TEST(Engine, FeasiblePointIsFixed) {
  std::mt19937_64 rng(6);
  const Index n = 5, m = 9;
  std::vector<QuadraticConstraint> cons;
  const Vec x = oracle::randn(n, rng);
  for (Index i = 0; i < m; ++i) {
    const Mat h = oracle::random_hermitian(n, rng);
    const double q = x.dot(h * x).real();
    cons.emplace_back(HermitianMatrix(h), Vec::Zero(n), q + 0.5, ConstraintSense::less_equal());
  }
  const auto p = QcqpProblem::feasibility(n, cons);
  ConsensusAdmm engine(p, SolverConfig{});
  ConsensusState s;
  s.x = x;
  s.z.assign(m, x);
  s.u.assign(m, Vec::Zero(n));
  engine.set_state(s);
  for (int k = 0; k < 10; ++k) {
    const double moved = engine.feasibility_step();
    EXPECT_LE(moved, 8.0 * std::numeric_limits<double>::epsilon() * x.norm());
  }
  for (Index i = 0; i < m; ++i) EXPECT_EQ(engine.state().u[i], engine.state().z[i] - engine.state().x);
  EXPECT_LE(consensus_residual(engine.state()), 1e-28);
}

TEST(Engine, SetStateChecksDimensions) {
  ConsensusAdmm engine(projection_onto_ball(), SolverConfig{});
  ConsensusState s;
  s.x = Vec::Zero(3);
  s.z.assign(1, Vec::Zero(3));
  s.u.assign(1, Vec::Zero(3));
  EXPECT_THROW(engine.set_state(s), InvalidInputError);
}

TEST(Config, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rho = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigurationError);
  cfg = {};
  cfg.max_iter_phase1 = 0;
  EXPECT_THROW(cfg.validate(), ConfigurationError);
  cfg = {};
  cfg.tol_successive = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigurationError);
  cfg = {};
  cfg.restarts_phase1 = -1;
  EXPECT_THROW(cfg.validate(), ConfigurationError);
}

TEST(Run, ProjectionOntoBall) {
  SolverConfig cfg;
  cfg.seed = 3;
  const auto r = run(projection_onto_ball(), cfg);
  EXPECT_TRUE(r.feasible);
  EXPECT_FALSE(r.probably_infeasible);
  EXPECT_NEAR(std::abs(r.x[0]), 1.0, 1e-5);
  EXPECT_NEAR(std::abs(r.x[1]), 0.0, 1e-5);
  EXPECT_NEAR(r.objective, -5.0, 1e-5);
  EXPECT_LT(r.kkt.stationarity, 1e-4);
  ASSERT_EQ(r.multipliers.size(), 1u);
  EXPECT_NEAR(r.multipliers[0], 2.0, 1e-4);
}

TEST(Run, RankOneLowerBound) {
  // min ||x||^2 s.t. |x_0|^2 >= 1: optimum objective 1.
  Vec e = Vec::Zero(3);
  e[0] = 1.0;
  const QcqpProblem p({HermitianMatrix::identity(3), Vec::Zero(3)},
                      {QuadraticConstraint::rank_one(e, 1.0, ConstraintSense::greater_equal())});
  SolverConfig cfg;
  cfg.seed = 11;
  const auto r = run(p, cfg);
  EXPECT_TRUE(r.feasible);
  EXPECT_NEAR(r.objective, 1.0, 1e-5);
  EXPECT_LT(r.kkt.stationarity, 1e-4);
  EXPECT_GE(r.multipliers[0], 0.0);
}

TEST(Run, FeasibilityOnlyStopsAtFeasiblePoint) {
  std::mt19937_64 rng(7);
  std::vector<QuadraticConstraint> cons;
  for (int i = 0; i < 6; ++i) {
    cons.push_back(QuadraticConstraint::rank_one(oracle::randn(4, rng), 1.0, ConstraintSense::equal()));
  }
  SolverConfig cfg;
  cfg.seed = 1;
  const auto r = run(QcqpProblem::feasibility(4, cons), cfg);
  if (!r.probably_infeasible) {
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.iterations_phase2, 0);
  }
}

TEST(Run, ContradictoryConstraintsReported) {
  std::vector<QuadraticConstraint> cons = ball(2, 1.0, ConstraintSense::less_equal());
  cons.push_back(ball(2, 4.0, ConstraintSense::greater_equal()).front());
  SolverConfig cfg;
  cfg.max_iter_phase1 = 50;
  cfg.restarts_phase1 = 2;
  const auto r = run(QcqpProblem({HermitianMatrix::identity(2), Vec::Zero(2)}, cons), cfg);
  EXPECT_TRUE(r.probably_infeasible);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.restarts, 2);
  EXPECT_EQ(r.iterations_phase1, 150);
  EXPECT_EQ(r.iterations_phase2, 0);
}

TEST(Run, TraceIsSequential) {
  std::vector<TraceRow> rows;
  SolverConfig cfg;
  cfg.seed = 5;
  cfg.trace = [&](const TraceRow& row) { rows.push_back(row); };
  const auto r = run(projection_onto_ball(), cfg);
  ASSERT_EQ(static_cast<Index>(rows.size()), r.iterations_phase1 + r.iterations_phase2);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].iteration, static_cast<Index>(k + 1));
    if (k > 0) EXPECT_GE(rows[k].phase, rows[k - 1].phase);
  }
}

TEST(Run, DeterministicAcrossThreadCounts) {
  std::mt19937_64 rng(8);
  std::vector<QuadraticConstraint> cons;
  for (int i = 0; i < 12; ++i) {
    cons.emplace_back(HermitianMatrix(oracle::random_hermitian(4, rng)), oracle::randn(4, rng),
                      1.0, ConstraintSense::less_equal());
  }
  const QcqpProblem p({HermitianMatrix::identity(4), Vec::Zero(4)}, cons);
  SolverConfig cfg;
  cfg.seed = 9;
  cfg.max_iter_phase2 = 200;
  const auto one = run(p, cfg);
  cfg.threads = 3;
  const auto three = run(p, cfg);
  EXPECT_EQ(one.x, three.x);
  EXPECT_EQ(one.iterations_phase2, three.iterations_phase2);
}

TEST(Random, NormalField) {
  std::mt19937_64 rng(9);
  const Vec r = random_normal(2000, Field::Real, rng);
  EXPECT_EQ(r.imag().cwiseAbs().maxCoeff(), 0.0);
  const Vec c = random_normal(20000, Field::Complex, rng);
  EXPECT_NEAR(c.squaredNorm() / 20000.0, 1.0, 0.05);
  EXPECT_NEAR(c.real().squaredNorm() / 20000.0, 0.5, 0.03);
}
