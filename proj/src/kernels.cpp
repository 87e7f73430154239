#include "cadmm/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>

#include "cadmm/qcqp1.hpp"
#include "cadmm/rootfind.hpp"

namespace cadmm::kernels {

namespace {

constexpr Index kRowBlock = 64;

// Fixed-shape pairwise reduction; leaf(l, acc) accumulates leaf block l into acc.
template <typename Leaf>
Vec tree_reduce(Index count, Index dim, Leaf&& leaf) {
  if (count <= 0) return Vec::Zero(dim);
  const Index leaves = (count + kLeafBlock - 1) / kLeafBlock;
  std::vector<Vec> partial(static_cast<std::size_t>(leaves));
#pragma omp parallel for schedule(static)
  for (Index l = 0; l < leaves; ++l) {
    Vec acc = Vec::Zero(dim);
    leaf(l, acc);
    partial[static_cast<std::size_t>(l)] = std::move(acc);
  }
  while (partial.size() > 1) {
    const std::size_t pairs = partial.size() / 2;
    std::vector<Vec> next(pairs + partial.size() % 2);
    for (std::size_t k = 0; k < pairs; ++k) next[k] = partial[2 * k] + partial[2 * k + 1];
    if (partial.size() % 2 == 1) next.back() = std::move(partial.back());
    partial = std::move(next);
  }
  return std::move(partial.front());
}

void check_scalar_sizes(const Vec& xi, const Vec& alpha, Index m) {
  if (xi.size() != m || alpha.size() != m) {
    throw InvalidInputError("scalar update: xi/alpha length disagrees with constraint count");
  }
}

void rank1_one(Index i, const Vec& xi, Vec& alpha, Vec& nu, RVec& tau, const RVec& c,
               std::span<const ConstraintSense> senses, const RVec& a_norm_sq) {
  const Complex d = xi[i] - alpha[i];
  const double t = rank1_shift(std::abs(d), c[i], senses[static_cast<std::size_t>(i)]);
  const Complex shifted = unit_phase(d) * t;
  tau[i] = t;
  alpha[i] = shifted;
  nu[i] = shifted / a_norm_sq[i];
}

void gaussian_one(Index i, const Vec& xi, Vec& alpha, Vec& nu, RVec& mu, const RVec& y,
                  double rho, const RVec& a_norm_sq) {
  const Complex d = xi[i] - alpha[i];
  const double a2 = a_norm_sq[i];
  const double m_i = solve_cubic_mu({y[i], rho, a2, std::norm(d)});
  const double coeff = m_i / (rho + m_i * a2);
  mu[i] = m_i;
  nu[i] = -coeff * d;
  alpha[i] = -(coeff * a2) * d;
}

}  // namespace

ThreadLimit::ThreadLimit(int n) : previous_(omp_get_max_threads()), active_(n > 0) {
  if (active_) omp_set_num_threads(n);
}

ThreadLimit::~ThreadLimit() {
  if (active_) omp_set_num_threads(previous_);
}

int max_threads() { return omp_get_max_threads(); }

void parallel_for(Index count, const std::function<void(Index)>& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(cadmm_parallel_for_error)
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

void adjoint_matvec(const Mat& a, const Vec& x, Vec& out) {
  if (x.size() != a.rows()) throw InvalidInputError("adjoint_matvec: dimension mismatch");
  out.resize(a.cols());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < a.cols(); ++i) out[i] = a.col(i).dot(x);
}

void matvec(const Mat& a, const Vec& v, Vec& out) {
  if (v.size() != a.cols()) throw InvalidInputError("matvec: dimension mismatch");
  out.resize(a.rows());
  const Index blocks = (a.rows() + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    const Index r0 = b * kRowBlock;
    const Index len = std::min(kRowBlock, a.rows() - r0);
    out.segment(r0, len).noalias() = a.middleRows(r0, len) * v;
  }
}

Vec tree_sum(std::span<const Vec> terms) {
  if (terms.empty()) throw InvalidInputError("tree_sum of no terms");
  const Index count = static_cast<Index>(terms.size());
  return tree_reduce(count, terms.front().size(), [&](Index l, Vec& acc) {
    const Index end = std::min(count, (l + 1) * kLeafBlock);
    for (Index i = l * kLeafBlock; i < end; ++i) acc += terms[static_cast<std::size_t>(i)];
  });
}

Vec consensus_sum(std::span<const Vec> z, std::span<const Vec> u) {
  if (z.size() != u.size() || z.empty()) {
    throw InvalidInputError("consensus_sum needs matching, non-empty z and u");
  }
  const Index count = static_cast<Index>(z.size());
  return tree_reduce(count, z.front().size(), [&](Index l, Vec& acc) {
    const Index end = std::min(count, (l + 1) * kLeafBlock);
    for (Index i = l * kLeafBlock; i < end; ++i) {
      const auto k = static_cast<std::size_t>(i);
      acc += z[k] + u[k];
    }
  });
}

void rank1_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& tau, const RVec& c,
                         std::span<const ConstraintSense> senses, const RVec& a_norm_sq) {
  const Index m = c.size();
  check_scalar_sizes(xi, alpha, m);
  nu.resize(m);
  tau.resize(m);
  parallel_for(m, [&](Index i) { rank1_one(i, xi, alpha, nu, tau, c, senses, a_norm_sq); });
}

void gaussian_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& mu, const RVec& y,
                            double rho, const RVec& a_norm_sq) {
  const Index m = y.size();
  check_scalar_sizes(xi, alpha, m);
  nu.resize(m);
  mu.resize(m);
  parallel_for(m, [&](Index i) { gaussian_one(i, xi, alpha, nu, mu, y, rho, a_norm_sq); });
}

namespace serial {

void adjoint_matvec(const Mat& a, const Vec& x, Vec& out) { out = a.adjoint() * x; }

void matvec(const Mat& a, const Vec& v, Vec& out) { out = a * v; }

Vec tree_sum(std::span<const Vec> terms) {
  if (terms.empty()) throw InvalidInputError("tree_sum of no terms");
  Vec acc = Vec::Zero(terms.front().size());
  for (const Vec& t : terms) acc += t;
  return acc;
}

void rank1_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& tau, const RVec& c,
                         std::span<const ConstraintSense> senses, const RVec& a_norm_sq) {
  const Index m = c.size();
  check_scalar_sizes(xi, alpha, m);
  nu.resize(m);
  tau.resize(m);
  for (Index i = 0; i < m; ++i) rank1_one(i, xi, alpha, nu, tau, c, senses, a_norm_sq);
}

void gaussian_scalar_update(const Vec& xi, Vec& alpha, Vec& nu, RVec& mu, const RVec& y,
                            double rho, const RVec& a_norm_sq) {
  const Index m = y.size();
  check_scalar_sizes(xi, alpha, m);
  nu.resize(m);
  mu.resize(m);
  for (Index i = 0; i < m; ++i) gaussian_one(i, xi, alpha, nu, mu, y, rho, a_norm_sq);
}

}  // namespace serial

}  // namespace cadmm::kernels
