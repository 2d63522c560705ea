#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "freeconvex/error.hpp"

namespace freeconvex {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Relative tolerance used for psd tests unless a caller overrides it.
inline constexpr double kDefaultPsdTol = 1e-9;
/// Largest asymmetry |M - M^dagger| accepted by the Hermitian constructor.
inline constexpr double kHermitianTol = 1e-12;
/// Default cap on the dimension of dense products (kron, MPDO expansion).
inline constexpr Index kDefaultDimCap = 4096;

bool all_finite(const ComplexMatrix& m);

/// Complex square matrix with exact Hermitian symmetry.
///
/// Construction checks that the input is square, finite and Hermitian to
/// within `tol` (relative to max(1, max|entry|)), then stores (M + M^dagger)/2
/// so the stored matrix is exactly Hermitian. Immutable after construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m, double tol = kHermitianTol);

  static HermitianMatrix identity(Index n);
  static HermitianMatrix zero(Index n);
  static HermitianMatrix from_real(const RealMatrix& m, double tol = kHermitianTol);
  static HermitianMatrix diagonal(const RealVector& d);
  /// Hermitian part (M + M^dagger)/2 without an asymmetry check. For results of
  /// computations that are Hermitian in exact arithmetic.
  static HermitianMatrix hermitian_part(const ComplexMatrix& m);

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }
  double norm() const { return m_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator-() const;
  HermitianMatrix operator*(double s) const;
  friend HermitianMatrix operator*(double s, const HermitianMatrix& h) { return h * s; }

 private:
  ComplexMatrix m_;
};

/// tr(A B) for Hermitian A, B (real).
double trace_inner(const HermitianMatrix& a, const HermitianMatrix& b);

struct EigenDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // unitary, columns match eigenvalues
};

EigenDecomposition eigh(const HermitianMatrix& h);
RealVector eigvalsh(const HermitianMatrix& h);
double min_eigenvalue(const HermitianMatrix& h);
double max_eigenvalue(const HermitianMatrix& h);

/// U f(diag) U^dagger.
HermitianMatrix apply_spectral(const HermitianMatrix& h,
                               const std::function<double(double)>& f);

/// Square root of a psd matrix. Eigenvalues in [-clip, 0) are treated as zero;
/// anything more negative is rejected with InvalidInput.
HermitianMatrix psd_sqrt(const HermitianMatrix& h, double clip = 1e-10);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   Index cap = kDefaultDimCap);
HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b,
                     Index cap = kDefaultDimCap);

/// True iff lambda_min(h) >= -tol * max(1, max |lambda|).
bool is_psd(const HermitianMatrix& h, double tol = kDefaultPsdTol);

/// Traces out `site` of a tensor product with local dimensions `dims`
/// (site 0 is the most significant factor).
HermitianMatrix partial_trace(const HermitianMatrix& m, std::span<const Index> dims,
                              std::size_t site);

/// Transposes the second factor of a d x s bipartite matrix.
HermitianMatrix partial_transpose(const HermitianMatrix& m, Index d, Index s);

/// Realignment R[(i,j),(k,l)] = M[(i,k),(j,l)]; rank(R) is the operator
/// Schmidt rank of M across the d|s cut.
ComplexMatrix realign(const ComplexMatrix& m, Index d, Index s);
inline ComplexMatrix realign(const HermitianMatrix& m, Index d, Index s) {
  return realign(m.matrix(), d, s);
}

RealVector singular_values(const ComplexMatrix& m);
/// Number of singular values >= rel_tol * sigma_max.
Index numerical_rank(const ComplexMatrix& m, double rel_tol = 1e-9);

/// Orthonormal Hermitian basis of Mat_n: E_jj, (E_jk + E_kj)/sqrt2, i(E_jk - E_kj)/sqrt2.
std::vector<HermitianMatrix> hermitian_basis(Index n);

}  // namespace freeconvex
