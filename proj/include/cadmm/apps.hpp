#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "cadmm/admm.hpp"
#include "cadmm/model.hpp"
#include "cadmm/rank1.hpp"

namespace cadmm {

/// min ||x||^2 over m indefinite constraints x^H A_i x <= c_i, built around a known point.
struct FppInstance {
  QcqpProblem problem;
  Vec x_feas;
};

/// |h_i^H w|^2 >= tau for the columns of H, |g_k^H w|^2 <= eta for the columns of G.
struct BeamformingInstance {
  Mat H;
  Mat G;  // n x l, l may be 0
  double tau = 1.0;
  double eta = 1.0;
};

enum class NoiseModel { Noiseless, Bounded, Gaussian };

struct PhaseRetrievalInstance {
  Mat A_s;
  RVec y;
  NoiseModel noise = NoiseModel::Noiseless;
  double eps = 0.5;      // Bounded half-width
  double snr_db = 20.0;  // Gaussian only, informational
  std::optional<Vec> s;  // ground truth when known
};

// Generators. All draws come from one mt19937_64 seeded with `seed`.

/// x_feas ~ CN(0, I); A_i = (G + G^H) / 2 with G entries CN(0, 1);
/// c_i = x_feas^H A_i x_feas + |v_i|, v_i ~ N(0, 1), so x_feas is feasible. Objective ||x||^2.
FppInstance gen_fpp(Index n, Index m, std::uint64_t seed);

/// Channels H (n x m) and G (n x l) with i.i.d. CN(0, 1) entries.
BeamformingInstance gen_mb(Index n, Index m, Index l, double tau, double eta,
                           std::uint64_t seed);

/// s has i.i.d. entries with N(0, 1) real and imaginary parts, A_s entries CN(0, 1),
/// y = |A_s^H s|^2 then perturbed per the noise model:
/// Bounded rounds to the nearest integer (or adds U(-eps, eps) noise when round_to_integer is
/// false); Gaussian adds real white noise at 10 log10(||y||^2 / ||w||^2) = snr_db.
PhaseRetrievalInstance gen_pr(Index n, Index m, NoiseModel noise, std::uint64_t seed,
                              double eps = 0.5, double snr_db = 20.0,
                              bool round_to_integer = true);

// Drivers. Iteration caps, tolerances, restarts, seed and threads come from cfg; cfg.rho is
// used by fpp_solve only, the others apply their own rules unless `rho` is given.

/// Two-phase general solver with rho = cfg.rho (1 by default).
SolveReport fpp_solve(const FppInstance& inst, const SolverConfig& cfg);

/// Starts from a random w scaled up to feasibility and runs the compressed GreaterEqual
/// iteration with objective ||w||^2 and rho = 2 sqrt(m). The returned w is the smallest-power
/// feasible rescaling among the iterates, so its power never exceeds the initial one.
SolveReport mb_single_group(const BeamformingInstance& inst, const SolverConfig& cfg,
                            std::optional<double> rho = std::nullopt);

/// rho-free feasibility phase over all m + l constraints with restarts, then the objective
/// phase with rho = 2 sqrt(m + l). With l = 0 this is mb_single_group.
SolveReport mb_secondary(const BeamformingInstance& inst, const SolverConfig& cfg,
                         std::optional<double> rho = std::nullopt);

/// Power of the initial point of mb_single_group for the same instance and seed.
double mb_initial_power(const BeamformingInstance& inst, std::uint64_t seed);

enum class PrInit { Spectral, Random };

/// Leading eigenvector of sum_i y_i a_i a_i^H by power iteration, scaled to norm
/// sqrt(sum(y) / m).
Vec spectral_init(const Mat& a_s, const RVec& y, std::mt19937_64& rng, int iterations = 200);

inline constexpr Index kPhaseRetrievalMaxIter = 100000;

/// Runs the matching compressed iteration from `init` for at most cfg.max_iter_phase2
/// iterations or until ||x_new - x_old|| < cfg.tol_successive. The objective reported is the
/// least-squares misfit 1/2 sum_i (y_i - |a_i^H x|^2)^2.
SolveReport pr_solve(const PhaseRetrievalInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior, const Vec& init,
                     std::optional<double> rho = std::nullopt);

/// Convenience: builds the initial point from cfg.seed and calls pr_solve.
SolveReport pr_solve(const PhaseRetrievalInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior = {}, PrInit init = PrInit::Spectral,
                     std::optional<double> rho = std::nullopt);

/// 10 log10(min_theta ||e^{j theta} x - s||^2), floored at -300 dB.
double metric_mse(const Vec& x, const Vec& s);

/// min_theta ||e^{j theta} x - s||^2 < 1e-5.
bool resolved(const Vec& x, const Vec& s, double threshold = 1e-5);

}  // namespace cadmm
