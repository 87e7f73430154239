#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cadmm/linalg.hpp"
#include "cadmm/model.hpp"

// Data-parallel building blocks of the consensus iterations.
//
// Every kernel in cadmm::kernels is OpenMP-parallel and produces bitwise-identical output
// for any thread count: work is split into fixed-size blocks whose shape does not depend on
// the number of workers, and each output element is computed by exactly one worker in a
// fixed order. cadmm::kernels::serial keeps straightforward single-threaded versions used
// as references by the tests and the benchmarks.

namespace cadmm::kernels {

/// Sets the OpenMP thread count for the lifetime of the object (no-op for n <= 0).
class ThreadLimit {
 public:
  explicit ThreadLimit(int n);
  ~ThreadLimit();
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
  int previous_;
  bool active_;
};

int max_threads();

/// Runs body(i) for i in [0, count) in parallel; rethrows the first exception after the join.
void parallel_for(Index count, const std::function<void(Index)>& body);

/// out = A^H x, one column dot product per output entry.
void adjoint_matvec(const Mat& a, const Vec& x, Vec& out);

/// out = A v, in fixed row blocks.
void matvec(const Mat& a, const Vec& v, Vec& out);

/// Sum of terms in a fixed pairwise tree: leaves are consecutive blocks of kLeafBlock terms
/// summed left to right, then adjacent partial sums are combined level by level.
inline constexpr Index kLeafBlock = 8;
Vec tree_sum(std::span<const Vec> terms);

/// Sum of z_i + u_i over all constraints, through tree_sum.
Vec consensus_sum(std::span<const Vec> z, std::span<const Vec> u);

/// Per-constraint scalar step of the compressed rank-one iteration:
///   d = xi_i - alpha_i,  tau_i = rank1_shift(|d|, c_i, sense_i),
///   alpha_i <- phase(d) tau_i,  nu_i <- alpha_i / ||a_i||^2.
void rank1_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& tau, const RVec& c,
                         std::span<const ConstraintSense> senses, const RVec& a_norm_sq);

/// Scalar step of the noisy-magnitude iteration; mu_i from the cubic with d = |xi_i - alpha_i|^2:
///   nu_i <- -mu_i / (rho + mu_i a2_i) d,  alpha_i <- -mu_i a2_i / (rho + mu_i a2_i) d.
void gaussian_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& mu, const RVec& y,
                            double rho, const RVec& a_norm_sq);

namespace serial {

void adjoint_matvec(const Mat& a, const Vec& x, Vec& out);
void matvec(const Mat& a, const Vec& v, Vec& out);
/// Plain left-to-right sum.
Vec tree_sum(std::span<const Vec> terms);
void rank1_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& tau, const RVec& c,
                         std::span<const ConstraintSense> senses, const RVec& a_norm_sq);
void gaussian_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& mu, const RVec& y,
                            double rho, const RVec& a_norm_sq);

}  // namespace serial

}  // namespace cadmm::kernels
