#include "cadmm/apps.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "cadmm/kernels.hpp"

namespace cadmm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Objective identity_objective(Index n) {
  return Objective{HermitianMatrix::identity(n), Vec::Zero(n)};
}

// Verifies x against the raw rank-one constraints and fills the common report fields.
void fill_rank1_report(SolveReport& r, const Rank1System& sys, const Vec& x, double feas_tol) {
  Vec xi;
  kernels::adjoint_matvec(sys.A_s(), x, xi);
  const RVec v = scaled_violations(sys, xi);
  r.x = x;
  r.max_violation = v.maxCoeff();
  r.violations = (v.array() > feas_tol).count();
  r.feasible = r.max_violation <= feas_tol;
}

// ||x - 0 + sum_i rho mu_i a_i a_i^H x|| with mu in the canonical orientation.
double identity_stationarity(const Rank1System& sys, const Vec& x, const RVec& mu, double rho) {
  Vec xi;
  kernels::adjoint_matvec(sys.A_s(), x, xi);
  Vec w(sys.m());
  for (Index i = 0; i < sys.m(); ++i) {
    const bool ge = sys.senses()[static_cast<std::size_t>(i)].kind() ==
                    ConstraintSense::Kind::GreaterEqual;
    w[i] = (ge ? -rho : rho) * mu[i] * xi[i];
  }
  Vec a_w;
  kernels::matvec(sys.A_s(), w, a_w);
  return (x + a_w).norm();
}

void emit(const SolverConfig& cfg, Index iteration, int phase, double consensus,
          double successive, double objective) {
  if (cfg.trace) cfg.trace({iteration, phase, consensus, successive, objective});
}

Vec draw_beamformer(Index n, std::mt19937_64& rng) { return random_normal(n, Field::Complex, rng); }

// min_theta ||e^{j theta} x - s||^2, attained at the phase of x^H s.
double aligned_error(const Vec& x, const Vec& s) {
  return (unit_phase(x.dot(s)) * x - s).squaredNorm();
}

}  // namespace

SolveReport fpp_solve(const FppInstance& inst, const SolverConfig& cfg) {
  return run(inst.problem, cfg);
}

double mb_initial_power(const BeamformingInstance& inst, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Mat h = inst.H / std::sqrt(inst.tau);
  const Vec w = draw_beamformer(inst.H.rows(), rng);
  const double lo = (h.adjoint() * w).cwiseAbs().minCoeff();
  return w.squaredNorm() / (lo * lo);
}

SolveReport mb_single_group(const BeamformingInstance& inst, const SolverConfig& cfg,
                            std::optional<double> rho) {
  cfg.validate();
  const auto start = Clock::now();
  kernels::ThreadLimit threads(cfg.threads);
  const Index n = inst.H.rows();
  const Index m = inst.H.cols();
  if (!(inst.tau > 0.0)) throw InvalidInputError("SNR target must be positive");

  // |h^H w|^2 >= tau  <=>  |(h / sqrt(tau))^H w|^2 >= 1.
  const Rank1System sys(inst.H / std::sqrt(inst.tau), RVec::Ones(m),
                        ConstraintSense::greater_equal());
  std::mt19937_64 rng(cfg.seed);
  Vec w = draw_beamformer(n, rng);
  w /= (sys.A_s().adjoint() * w).cwiseAbs().minCoeff();

  const double r = rho.value_or(2.0 * std::sqrt(static_cast<double>(m)));
  const CompressedEngine engine(sys, identity_objective(n), r);
  CompressedState st = initial_compressed_state(sys, w);

  Vec best = w;
  double best_power = w.squaredNorm();
  RVec best_mu = RVec::Zero(m);
  SolveReport report;
  double successive = 0.0;
  for (Index it = 0; it < cfg.max_iter_phase2; ++it) {
    successive = engine.step(st);
    ++report.iterations_phase2;
    emit(cfg, report.iterations_phase2, 2, st.consensus, successive, st.x.squaredNorm());
    const double lo = st.xi.cwiseAbs().minCoeff();
    if (lo > 0.0) {
      const double power = st.x.squaredNorm() / (lo * lo);
      if (power < best_power) {
        best_power = power;
        best = st.x / lo;
        best_mu = st.mu;
      }
    }
    if (successive < cfg.tol_successive) break;
  }

  const Rank1System original(inst.H, RVec::Constant(m, inst.tau),
                             ConstraintSense::greater_equal());
  fill_rank1_report(report, original, best, cfg.feas_tol);
  report.objective = best.squaredNorm();
  report.consensus_residual = st.consensus;
  report.successive_diff = successive;
  report.kkt_stationarity = identity_stationarity(sys, best, best_mu, r);
  report.kkt.stationarity = report.kkt_stationarity;
  report.kkt.primal_feas = report.max_violation;
  report.multipliers.assign(best_mu.data(), best_mu.data() + m);
  for (double& v : report.multipliers) v *= r;
  report.wall_time = seconds_since(start);
  return report;
}

SolveReport mb_secondary(const BeamformingInstance& inst, const SolverConfig& cfg,
                         std::optional<double> rho) {
  if (inst.G.cols() == 0) return mb_single_group(inst, cfg, rho);
  cfg.validate();
  const auto start = Clock::now();
  kernels::ThreadLimit threads(cfg.threads);
  const Index n = inst.H.rows();
  const Index m = inst.H.cols();
  const Index l = inst.G.cols();
  if (inst.G.rows() != n) throw InvalidInputError("H and G must have the same row count");

  Mat a_s(n, m + l);
  a_s << inst.H, inst.G;
  RVec c(m + l);
  c << RVec::Constant(m, inst.tau), RVec::Constant(l, inst.eta);
  std::vector<ConstraintSense> senses(static_cast<std::size_t>(m),
                                      ConstraintSense::greater_equal());
  senses.resize(static_cast<std::size_t>(m + l), ConstraintSense::less_equal());
  const Rank1System sys(std::move(a_s), std::move(c), std::move(senses));

  // Smallest-power feasible scaling of x, if the scaling interval is non-empty.
  auto polish = [&](const Vec& x, const Vec& xi) -> std::optional<Vec> {
    const double h_min = xi.head(m).cwiseAbs2().minCoeff();
    const double g_max = xi.tail(l).cwiseAbs2().maxCoeff();
    if (!(h_min > 0.0)) return std::nullopt;
    const double lo = inst.tau / h_min;
    const double hi = g_max > 0.0 ? inst.eta / g_max : std::numeric_limits<double>::infinity();
    if (lo > hi) return std::nullopt;
    return Vec(x * std::sqrt(lo));
  };

  SolveReport report;
  Index iteration = 0;
  double successive = 0.0;
  std::mt19937_64 rng(cfg.seed);
  const CompressedEngine feasibility(sys);
  CompressedState st;
  bool found = false;
  for (Index attempt = 0; attempt <= cfg.restarts_phase1 && !found; ++attempt) {
    if (attempt > 0) ++report.restarts;
    st = initial_compressed_state(sys, draw_beamformer(n, rng));
    for (Index it = 0; it < cfg.max_iter_phase1; ++it) {
      successive = feasibility.step(st);
      ++iteration;
      ++report.iterations_phase1;
      emit(cfg, iteration, 1, st.consensus, successive, st.x.squaredNorm());
      if (scaled_violations(sys, st.xi).maxCoeff() <= cfg.feas_tol) {
        found = true;
        break;
      }
    }
  }

  Vec best = st.x;
  const double r = rho.value_or(2.0 * std::sqrt(static_cast<double>(m + l)));
  if (found) {
    if (auto p = polish(st.x, st.xi)) best = *p;
    double best_power = best.squaredNorm();
    const CompressedEngine engine(sys, identity_objective(n), r);
    for (Index it = 0; it < cfg.max_iter_phase2; ++it) {
      successive = engine.step(st);
      ++iteration;
      ++report.iterations_phase2;
      emit(cfg, iteration, 2, st.consensus, successive, st.x.squaredNorm());
      if (auto p = polish(st.x, st.xi); p && p->squaredNorm() < best_power) {
        best_power = p->squaredNorm();
        best = std::move(*p);
      }
      if (successive < cfg.tol_successive) break;
    }
  }

  fill_rank1_report(report, sys, best, cfg.feas_tol);
  report.objective = best.squaredNorm();
  report.consensus_residual = st.consensus;
  report.successive_diff = successive;
  report.kkt_stationarity = found ? identity_stationarity(sys, best, st.mu, r) : 0.0;
  report.kkt.stationarity = report.kkt_stationarity;
  report.kkt.primal_feas = report.max_violation;
  report.probably_infeasible = !found;
  report.wall_time = seconds_since(start);
  return report;
}

Vec spectral_init(const Mat& a_s, const RVec& y, std::mt19937_64& rng, int iterations) {
  if (y.size() != a_s.cols()) throw InvalidInputError("one measurement per column of A_s");
  Vec v = random_normal(a_s.rows(), Field::Complex, rng);
  v.normalize();
  Vec xi;
  Vec next;
  for (int k = 0; k < iterations; ++k) {
    kernels::adjoint_matvec(a_s, v, xi);
    xi.array() *= y.cast<Complex>().array();
    kernels::matvec(a_s, xi, next);
    const double norm = next.norm();
    if (!(norm > 0.0)) break;
    v = next / norm;
  }
  const double energy = std::max(0.0, y.sum()) / static_cast<double>(y.size());
  return v * std::sqrt(energy);
}

SolveReport pr_solve(const PhaseRetrievalInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior, const Vec& init, std::optional<double> rho) {
  cfg.validate();
  const auto start = Clock::now();
  kernels::ThreadLimit threads(cfg.threads);
  const bool gaussian = inst.noise == NoiseModel::Gaussian;
  const ConstraintSense sense = inst.noise == NoiseModel::Bounded
                                    ? ConstraintSense::bounded(inst.eps)
                                    : ConstraintSense::equal();
  const Rank1System sys(inst.A_s, inst.y, sense);
  const CompressedEngine engine(sys, std::nullopt, 1.0, prior);
  CompressedState st = initial_compressed_state(sys, init);
  const double r = gaussian ? rho.value_or(gaussian_rho(sys, inst.y)) : 1.0;

  SolveReport report;
  double successive = 0.0;
  bool done = false;
  if (!gaussian) {
    kernels::adjoint_matvec(sys.A_s(), st.x, st.xi);
    done = scaled_violations(sys, st.xi).maxCoeff() <= cfg.feas_tol;
  }
  for (Index it = 0; !done && it < cfg.max_iter_phase2; ++it) {
    successive = gaussian ? engine.step_gaussian(st, inst.y, r) : engine.step(st);
    ++report.iterations_phase1;
    if (cfg.trace) {
      const double misfit = 0.5 * (inst.y - st.xi.cwiseAbs2()).squaredNorm();
      emit(cfg, report.iterations_phase1, 1, st.consensus, successive, misfit);
    }
    // The first x-update reproduces the initial point exactly.
    done = it > 0 && successive < cfg.tol_successive;
  }

  fill_rank1_report(report, sys, st.x, cfg.feas_tol);
  Vec xi;
  kernels::adjoint_matvec(sys.A_s(), st.x, xi);
  report.objective = 0.5 * (inst.y - xi.cwiseAbs2()).squaredNorm();
  report.consensus_residual = st.consensus;
  report.successive_diff = successive;
  report.kkt.primal_feas = report.max_violation;
  if (inst.s) report.mse_db = metric_mse(st.x, *inst.s);
  report.wall_time = seconds_since(start);
  return report;
}

SolveReport pr_solve(const PhaseRetrievalInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior, PrInit init, std::optional<double> rho) {
  std::mt19937_64 rng(cfg.seed);
  const Vec x0 = init == PrInit::Spectral
                     ? spectral_init(inst.A_s, inst.y, rng)
                     : random_normal(inst.A_s.rows(), Field::Complex, rng);
  return pr_solve(inst, cfg, prior, x0, rho);
}

double metric_mse(const Vec& x, const Vec& s) {
  if (x.size() != s.size()) throw InvalidInputError("metric_mse: length mismatch");
  const double err = aligned_error(x, s);
  if (err <= 0.0) return -300.0;
  return std::max(-300.0, 10.0 * std::log10(err));
}

bool resolved(const Vec& x, const Vec& s, double threshold) {
  if (x.size() != s.size()) throw InvalidInputError("resolved: length mismatch");
  return aligned_error(x, s) < threshold;
}

}  // namespace cadmm
