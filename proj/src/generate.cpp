#include <cmath>

#include "cadmm/apps.hpp"

namespace cadmm {

namespace {

Mat complex_normal_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  Mat out(rows, cols);
  for (Index j = 0; j < cols; ++j) out.col(j) = random_normal(rows, Field::Complex, rng);
  return out;
}

}  // namespace

FppInstance gen_fpp(Index n, Index m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw InvalidInputError("fpp instance needs n >= 1 and m >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec x_feas = random_normal(n, Field::Complex, rng);
  std::vector<QuadraticConstraint> cons;
  cons.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const Mat g = complex_normal_matrix(n, n, rng);
    HermitianMatrix a(g);
    const double v = normal(rng);
    const double c = x_feas.dot(a.matrix() * x_feas).real() + std::abs(v);
    cons.emplace_back(std::move(a), Vec::Zero(n), c, ConstraintSense::less_equal());
  }
  QcqpProblem p(Objective{HermitianMatrix::identity(n), Vec::Zero(n)}, std::move(cons));
  return {std::move(p), std::move(x_feas)};
}

BeamformingInstance gen_mb(Index n, Index m, Index l, double tau, double eta,
                           std::uint64_t seed) {
  if (n < 1 || m < 1 || l < 0) throw InvalidInputError("beamforming needs n, m >= 1, l >= 0");
  if (!(tau > 0.0) || !(eta > 0.0)) throw InvalidInputError("tau and eta must be positive");
  std::mt19937_64 rng(seed);
  BeamformingInstance inst;
  inst.H = complex_normal_matrix(n, m, rng);
  inst.G = complex_normal_matrix(n, l, rng);
  inst.tau = tau;
  inst.eta = eta;
  return inst;
}

PhaseRetrievalInstance gen_pr(Index n, Index m, NoiseModel noise, std::uint64_t seed,
                              double eps, double snr_db, bool round_to_integer) {
  if (n < 1 || m < 1) throw InvalidInputError("phase retrieval needs n >= 1 and m >= 1");
  std::mt19937_64 rng(seed);
  PhaseRetrievalInstance inst;
  const Vec s = std::sqrt(2.0) * random_normal(n, Field::Complex, rng);
  inst.A_s = complex_normal_matrix(n, m, rng);
  inst.y = (inst.A_s.adjoint() * s).cwiseAbs2();
  inst.noise = noise;
  inst.eps = eps;
  inst.snr_db = snr_db;
  inst.s = s;

  switch (noise) {
    case NoiseModel::Noiseless:
      break;
    case NoiseModel::Bounded:
      if (!(eps > 0.0)) throw InvalidInputError("bounded noise needs eps > 0");
      if (round_to_integer) {
        inst.y = inst.y.array().round();
      } else {
        std::uniform_real_distribution<double> uniform(-eps, eps);
        for (Index i = 0; i < m; ++i) inst.y[i] = std::max(0.0, inst.y[i] + uniform(rng));
      }
      break;
    case NoiseModel::Gaussian: {
      const double sigma2 = inst.y.squaredNorm() / static_cast<double>(m) *
                            std::pow(10.0, -snr_db / 10.0);
      std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
      for (Index i = 0; i < m; ++i) inst.y[i] += normal(rng);
      break;
    }
  }
  return inst;
}

}  // namespace cadmm
