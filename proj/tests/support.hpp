#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's own solvers; the helpers only build inputs or recompute
// quantities by the most direct route available.

#include <algorithm>
#include <cmath>
#include <vector>

#include "freeconvex/magic.hpp"
#include "freeconvex/matcore.hpp"
#include "freeconvex/random.hpp"

namespace fctest {

using namespace freeconvex;

/// Eigenvalues by cyclic Jacobi rotations on the real embedding
/// [[Re, -Im], [Im, Re]]; each eigenvalue appears twice there.
inline RealVector jacobi_eigenvalues(const ComplexMatrix& h) {
  const Index n = h.rows();
  RealMatrix a(2 * n, 2 * n);
  a << h.real(), -h.imag(), h.imag(), h.real();
  const Index m = 2 * n;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < m; ++p)
      for (Index q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Index p = 0; p < m; ++p)
      for (Index q = p + 1; q < m; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Index k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> all(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(all.begin(), all.end());
  RealVector out(n);
  for (Index i = 0; i < n; ++i) out(i) = all[static_cast<std::size_t>(2 * i)];
  return out;
}

inline double oracle_min_eig(const HermitianMatrix& h) { return jacobi_eigenvalues(h.matrix())(0); }

inline double oracle_negative_trace(const ComplexMatrix& h) {
  const RealVector ev = jacobi_eigenvalues(h);
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) s += std::max(-ev(i), 0.0);
  return s;
}

/// Kronecker product by the defining index formula.
inline ComplexMatrix kron_loops(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline ComplexMatrix unit_matrix(Index n, Index i, Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

/// Sinkhorn balancing of a positive random matrix to doubly stochastic.
inline RealMatrix sinkhorn(Index d, Rng& rng, double sparsity = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealMatrix m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = u(rng) + 0.01;
  // A symmetric zero pattern with a positive diagonal keeps total support, so
  // the balancing converges.
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j)
      if (u(rng) < sparsity) m(i, j) = m(j, i) = 0.0;
  for (int it = 0; it < 10000; ++it) {
    for (Index i = 0; i < d; ++i) m.row(i) /= m.row(i).sum();
    for (Index j = 0; j < d; ++j) m.col(j) /= m.col(j).sum();
    double err = 0.0;
    for (Index i = 0; i < d; ++i) err = std::max(err, std::abs(m.row(i).sum() - 1.0));
    if (err < 1e-15) break;
  }
  return m;
}

/// Random POVM: Gram matrices normalized by S^{-1/2} . S^{-1/2}.
inline std::vector<HermitianMatrix> random_povm_effects(Index m, Index k, Rng& rng) {
  std::vector<ComplexMatrix> g;
  ComplexMatrix total = ComplexMatrix::Zero(m, m);
  for (Index i = 0; i < k; ++i) {
    const ComplexMatrix a = random_gaussian(m, m, rng);
    g.push_back(a * a.adjoint());
    total += g.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(total);
  const ComplexMatrix inv_sqrt = es.eigenvectors() *
                                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                 es.eigenvectors().adjoint();
  std::vector<HermitianMatrix> out;
  for (const auto& x : g) out.push_back(HermitianMatrix::hermitian_part(inv_sqrt * x * inv_sqrt));
  return out;
}

/// Random psd matrix of the given rank (not normalized).
inline HermitianMatrix random_psd(Index n, Rng& rng, Index rank = -1) {
  const ComplexMatrix g = random_gaussian(n, rank < 0 ? n : rank, rng);
  return HermitianMatrix::hermitian_part(g * g.adjoint());
}

inline double rel_fro(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace fctest
