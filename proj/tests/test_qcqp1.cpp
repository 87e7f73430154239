#include <gtest/gtest.h>

#include <random>

#include "cadmm/qcqp1.hpp"
#include "oracles/oracles.hpp"

using namespace cadmm;

namespace {

const ConstraintSense kSenses[] = {ConstraintSense::less_equal(), ConstraintSense::greater_equal(),
                                   ConstraintSense::equal(), ConstraintSense::bounded(0.3)};

}  // namespace

TEST(EigenCacheTest, Reconstructs) {
  std::mt19937_64 rng(1);
  for (bool complex_field : {true, false}) {
    const Mat a = oracle::random_hermitian(5, rng, complex_field);
    const EigenCache cache{HermitianMatrix(a)};
    EXPECT_LT((cache.Q * cache.lambda.cast<Complex>().asDiagonal() * cache.Q.adjoint() - a).norm(), 1e-12);
    for (Index k = 1; k < 5; ++k) EXPECT_LE(cache.lambda[k - 1], cache.lambda[k]);
    if (!complex_field) EXPECT_EQ(cache.Q.imag().cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(UnitPhase, DegenerateIsOne) {
  EXPECT_EQ(unit_phase(Complex(0.0, 0.0)), Complex(1.0, 0.0));
  EXPECT_EQ(unit_phase(Complex(1e-15, 0.0)), Complex(1.0, 0.0));
  EXPECT_NEAR(std::abs(unit_phase(Complex(3.0, -4.0)) - Complex(0.6, -0.8)), 0.0, 1e-16);
}

TEST(Rank1Shift, Cases) {
  EXPECT_DOUBLE_EQ(rank1_shift(1.0, 4.0, ConstraintSense::equal()), 1.0);
  EXPECT_DOUBLE_EQ(rank1_shift(3.0, 4.0, ConstraintSense::equal()), -1.0);
  EXPECT_DOUBLE_EQ(rank1_shift(1.0, 4.0, ConstraintSense::less_equal()), 0.0);
  EXPECT_DOUBLE_EQ(rank1_shift(3.0, 4.0, ConstraintSense::less_equal()), -1.0);
  EXPECT_DOUBLE_EQ(rank1_shift(1.0, 4.0, ConstraintSense::greater_equal()), 1.0);
  EXPECT_DOUBLE_EQ(rank1_shift(3.0, 4.0, ConstraintSense::greater_equal()), 0.0);
  EXPECT_DOUBLE_EQ(rank1_shift(2.0, 4.0, ConstraintSense::bounded(0.5)), 0.0);
  EXPECT_DOUBLE_EQ(rank1_shift(3.0, 4.0, ConstraintSense::bounded(5.0)), 0.0);
  EXPECT_DOUBLE_EQ(rank1_shift(0.0, 1.0, ConstraintSense::bounded(3.0)), 0.0);
  EXPECT_DOUBLE_EQ(rank1_shift(3.0, 4.0, ConstraintSense::bounded(0.5)), std::sqrt(4.5) - 3.0);
  EXPECT_DOUBLE_EQ(rank1_shift(1.0, 4.0, ConstraintSense::bounded(0.5)), std::sqrt(3.5) - 1.0);
  EXPECT_THROW(rank1_shift(1.0, -1.0, ConstraintSense::equal()), InfeasibleConstraintError);
  EXPECT_THROW(rank1_shift(1.0, -1.0, ConstraintSense::less_equal()), InfeasibleConstraintError);
  EXPECT_DOUBLE_EQ(rank1_shift(1.0, -1.0, ConstraintSense::greater_equal()), 0.0);
}

TEST(Rank1, MatchesReferenceProjection) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int t = 0; t < 400; ++t) {
    const auto sense = kSenses[t % 4];
    const Vec a = oracle::randn(4, rng);
    const Vec zeta = oracle::randn(4, rng) * u(rng);
    const double c = u(rng);
    const auto sol = solve_rank1_homogeneous(a, c, zeta, sense);
    EXPECT_LT((sol.z - oracle::project_rank1(a, c, sense, zeta)).norm(), 1e-12);

    // Certificate in the canonical orientation.
    const bool ge = sense.kind() == ConstraintSense::Kind::GreaterEqual;
    const Mat aa = a * a.adjoint();
    const auto cert = oracle::certify(ge ? Mat(-aa) : aa, Vec::Zero(4), ge ? -c : c, zeta,
                                      sol.z, sol.mu, ge ? ConstraintSense::less_equal() : sense);
    EXPECT_LT(cert.stationarity, 1e-10);
    EXPECT_LT(cert.primal, 1e-10);
    EXPECT_EQ(cert.dual, 0.0);
    EXPECT_LT(cert.complementarity, 1e-10);
    EXPECT_LT(cert.curvature, 1e-12);
  }
}

TEST(Rank1, InteriorPointUnchanged) {
  Vec a(2), zeta(2);
  a << 1.0, 0.0;
  zeta << 0.5, 3.0;
  const auto sol = solve_rank1_homogeneous(a, 1.0, zeta, ConstraintSense::less_equal());
  EXPECT_EQ(sol.status, Qcqp1Status::AtInterior);
  EXPECT_EQ(sol.z, zeta);
  EXPECT_EQ(sol.mu, 0.0);
}

TEST(Rank1, DegeneratePhase) {
  Vec a(2), zeta(2);
  a << 1.0, 0.0;
  zeta << 0.0, 1.0;
  const auto sol = solve_rank1_homogeneous(a, 4.0, zeta, ConstraintSense::equal());
  EXPECT_EQ(sol.status, Qcqp1Status::PoleCase);
  EXPECT_NEAR(std::abs(sol.z[0] - Complex(2.0, 0.0)), 0.0, 1e-15);
  EXPECT_EQ(sol.z[1], zeta[1]);
}

TEST(Rank1, RejectsBadInput) {
  EXPECT_THROW(solve_rank1_homogeneous(Vec::Zero(2), 1.0, Vec::Ones(2), ConstraintSense::equal()),
               InvalidInputError);
  EXPECT_THROW(solve_rank1_homogeneous(Vec::Ones(3), 1.0, Vec::Ones(2), ConstraintSense::equal()),
               InvalidInputError);
}

TEST(General, GlobalCertificate) {
  std::mt19937_64 rng(3);
  const ConstraintSense senses[] = {ConstraintSense::less_equal(), ConstraintSense::equal(),
                                    ConstraintSense::bounded(0.2)};
  for (int t = 0; t < 600; ++t) {
    const Index n = 2 + t % 5;
    const auto sense = senses[t % 3];
    const Mat a = oracle::random_hermitian(n, rng, t % 7 != 0);
    const Vec b = (t % 2 == 0) ? oracle::randn(n, rng) : Vec::Zero(n);
    const Vec zeta = 2.0 * oracle::randn(n, rng);
    const double c = oracle::randn(1, rng, false)[0].real();
    const EigenCache cache{HermitianMatrix(a)};
    // A definite quadratic form has a bounded range; skip draws whose level set is empty.
    const bool definite = cache.lambda[0] > 0.0 || cache.lambda[n - 1] < 0.0;
    if (definite) {
      const double extreme = -b.dot(a.ldlt().solve(b)).real();
      const bool empty = cache.lambda[0] > 0.0 ? c + sense.eps() < extreme
                                               : c - sense.eps() > extreme && sense.kind() != ConstraintSense::Kind::LessEqual;
      if (empty) {
        EXPECT_THROW(solve_general(cache, b, c, zeta, sense), InfeasibleConstraintError);
        continue;
      }
    }
    for (RootMethod rf : {RootMethod::Bisection, RootMethod::Newton}) {
      const auto sol = solve_general(cache, b, c, zeta, sense, rf);
      const auto cert = oracle::certify(a, b, c, zeta, sol.z, sol.mu, sense);
      const double scale = 1.0 + zeta.norm() + std::abs(sol.mu);
      EXPECT_LT(cert.stationarity, 1e-8 * scale) << t;
      EXPECT_LT(cert.primal, 1e-8 * (1.0 + std::abs(c))) << t;
      EXPECT_EQ(cert.dual, 0.0);
      EXPECT_LT(cert.complementarity, 1e-8 * scale) << t;
      EXPECT_LT(cert.curvature, 1e-9) << t;
    }
  }
}

TEST(General, RealDataGivesRealSolution) {
  std::mt19937_64 rng(4);
  const Mat a = oracle::random_hermitian(4, rng, false);
  const Vec zeta = oracle::randn(4, rng, false);
  const auto sol = solve_general(EigenCache{HermitianMatrix(a)}, Vec::Zero(4), 0.5, zeta,
                                 ConstraintSense::equal());
  EXPECT_EQ(sol.z.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(General, HardCase) {
  // A = diag(-1, 1), zeta = (0, 1): the root sits at mu = 1 where I + mu A is singular.
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = 1.0;
  Vec zeta(2);
  zeta << 0.0, 1.0;
  const auto sol = solve_general(EigenCache{HermitianMatrix(a)}, Vec::Zero(2), 0.0, zeta,
                                 ConstraintSense::equal());
  EXPECT_EQ(sol.status, Qcqp1Status::PoleCase);
  EXPECT_DOUBLE_EQ(sol.mu, 1.0);
  const auto cert = oracle::certify(a, Vec::Zero(2), 0.0, zeta, sol.z, sol.mu, ConstraintSense::equal());
  EXPECT_LT(cert.stationarity, 1e-14);
  EXPECT_LT(cert.primal, 1e-14);
  EXPECT_NEAR((sol.z - zeta).squaredNorm(), 0.5, 1e-14);
}

TEST(General, BoundedRoundsToNearerSide) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Mat a = oracle::random_hermitian(3, rng);
    const Vec zeta = oracle::randn(3, rng);
    const double q0 = oracle::residual(a, Vec::Zero(3), 0.0, zeta);
    const double eps = 0.1;
    const double c = q0 + ((t % 2 == 0) ? 1.0 : -1.0);
    const auto sol = solve_bounded(EigenCache{HermitianMatrix(a)}, Vec::Zero(3), c, eps, zeta);
    const double r = oracle::residual(a, Vec::Zero(3), c, sol.z);
    EXPECT_NEAR(r, (t % 2 == 0) ? -eps : eps, 1e-9);
    const auto inside = solve_bounded(EigenCache{HermitianMatrix(a)}, Vec::Zero(3), q0 + 0.05,
                                      eps, zeta);
    EXPECT_EQ(inside.status, Qcqp1Status::AtInterior);
    EXPECT_EQ(inside.z, zeta);
  }
}

TEST(General, NoWorseThanSampledFeasiblePoints) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const Index n = 2 + t % 2;
    const Mat a = oracle::random_hermitian(n, rng);
    const Vec b = oracle::randn(n, rng);
    const Vec zeta = oracle::randn(n, rng);
    const double c = 0.5;
    const auto sol = solve_general(EigenCache{HermitianMatrix(a)}, b, c, zeta, ConstraintSense::equal());
    const double best = oracle::sampled_equal_best(a, b, c, zeta, 20000, rng);
    EXPECT_LE((sol.z - zeta).squaredNorm(), best + 1e-9);
  }
}

TEST(General, RejectsGreaterEqualAndMismatch) {
  const EigenCache cache{HermitianMatrix::identity(2)};
  EXPECT_THROW(solve_general(cache, Vec::Zero(2), 1.0, Vec::Ones(2), ConstraintSense::greater_equal()),
               InvalidInputError);
  EXPECT_THROW(solve_general(cache, Vec::Zero(3), 1.0, Vec::Ones(2), ConstraintSense::equal()),
               InvalidInputError);
}

TEST(GaussianMagnitude, MatchesOneDimensionalReference) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const Vec a = oracle::randn(3, rng);
    const Vec zeta = oracle::randn(3, rng) * (0.1 + 3.0 * u(rng));
    const double y = 5.0 * u(rng);
    const double rho = 1.1 * y * a.squaredNorm() + 0.01;
    const auto sol = solve_gaussian_magnitude(a, y, rho, zeta);
    EXPECT_LT((sol.z - oracle::project_gaussian(a, y, rho, zeta)).norm(), 1e-8 * (1.0 + zeta.norm()));
    EXPECT_NEAR(std::norm(a.dot(sol.z)) - y, sol.w, 1e-10 * (1.0 + y));
    EXPECT_EQ(sol.w, sol.mu);
  }
}
