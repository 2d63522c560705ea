#include "freeconvex/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace freeconvex {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::SizeLimit: return "size-limit";
    case ErrorKind::PreconditionViolation: return "precondition-violation";
    case ErrorKind::InvalidMap: return "invalid-map";
    case ErrorKind::InvalidInterval: return "invalid-interval";
    case ErrorKind::NumericalDegeneracy: return "numerical-degeneracy";
    case ErrorKind::InternalInconsistency: return "internal-inconsistency";
    case ErrorKind::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

bool all_finite(const ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
  require(m.rows() == m.cols(), ErrorKind::InvalidInput,
          "Hermitian matrix must be square, got " + std::to_string(m.rows()) + "x" +
              std::to_string(m.cols()));
  require(all_finite(m), ErrorKind::InvalidInput, "matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
  require(asym <= tol * scale, ErrorKind::InvalidInput,
          "matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")");
  m_ = (m + m.adjoint()) / 2.0;
}

HermitianMatrix HermitianMatrix::identity(Index n) {
  HermitianMatrix h;
  h.m_ = ComplexMatrix::Identity(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::zero(Index n) {
  HermitianMatrix h;
  h.m_ = ComplexMatrix::Zero(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::from_real(const RealMatrix& m, double tol) {
  return HermitianMatrix(m.cast<Complex>(), tol);
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  HermitianMatrix h;
  h.m_ = d.cast<Complex>().asDiagonal();
  return h;
}

HermitianMatrix HermitianMatrix::hermitian_part(const ComplexMatrix& m) {
  require(m.rows() == m.cols(), ErrorKind::InvalidInput, "Hermitian part of non-square matrix");
  HermitianMatrix h;
  h.m_ = (m + m.adjoint()) / 2.0;
  return h;
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  require(dim() == o.dim(), ErrorKind::InvalidInput, "dimension mismatch in sum");
  HermitianMatrix h;
  h.m_ = m_ + o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  require(dim() == o.dim(), ErrorKind::InvalidInput, "dimension mismatch in difference");
  HermitianMatrix h;
  h.m_ = m_ - o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-() const {
  HermitianMatrix h;
  h.m_ = -m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  HermitianMatrix h;
  h.m_ = m_ * s;
  return h;
}

double trace_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  require(a.dim() == b.dim(), ErrorKind::InvalidInput, "dimension mismatch in trace inner product");
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

EigenDecomposition eigh(const HermitianMatrix& h) {
  require(h.dim() >= 1, ErrorKind::InvalidInput, "eigh of an empty matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  require(solver.info() == Eigen::Success, ErrorKind::NumericalDegeneracy,
          "eigendecomposition did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector eigvalsh(const HermitianMatrix& h) {
  require(h.dim() >= 1, ErrorKind::InvalidInput, "eigvalsh of an empty matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorKind::NumericalDegeneracy,
          "eigendecomposition did not converge");
  return solver.eigenvalues();
}

double min_eigenvalue(const HermitianMatrix& h) { return eigvalsh(h)(0); }

double max_eigenvalue(const HermitianMatrix& h) {
  const RealVector ev = eigvalsh(h);
  return ev(ev.size() - 1);
}

HermitianMatrix apply_spectral(const HermitianMatrix& h,
                               const std::function<double(double)>& f) {
  const EigenDecomposition ed = eigh(h);
  RealVector fv = ed.eigenvalues.unaryExpr(f);
  const ComplexMatrix& u = ed.eigenvectors;
  return HermitianMatrix::hermitian_part(u * fv.cast<Complex>().asDiagonal() * u.adjoint());
}

HermitianMatrix psd_sqrt(const HermitianMatrix& h, double clip) {
  const EigenDecomposition ed = eigh(h);
  const double scale = std::max(1.0, ed.eigenvalues.cwiseAbs().maxCoeff());
  require(ed.eigenvalues(0) >= -clip * scale, ErrorKind::InvalidInput,
          "square root of a matrix that is not psd (lambda_min = " +
              std::to_string(ed.eigenvalues(0)) + ")");
  RealVector root = ed.eigenvalues.unaryExpr([](double x) { return std::sqrt(std::max(x, 0.0)); });
  const ComplexMatrix& u = ed.eigenvectors;
  return HermitianMatrix::hermitian_part(u * root.cast<Complex>().asDiagonal() * u.adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, Index cap) {
  require(all_finite(a) && all_finite(b), ErrorKind::InvalidInput, "kron of non-finite matrix");
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  require(rows <= cap && cols <= cap, ErrorKind::SizeLimit,
          "Kronecker product of size " + std::to_string(rows) + "x" + std::to_string(cols) +
              " exceeds the cap " + std::to_string(cap));
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b, Index cap) {
  return HermitianMatrix::hermitian_part(kron(a.matrix(), b.matrix(), cap));
}

bool is_psd(const HermitianMatrix& h, double tol) {
  require(tol >= 0.0, ErrorKind::InvalidInput, "psd tolerance must be nonnegative");
  if (h.dim() == 0) return true;
  const RealVector ev = eigvalsh(h);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return ev(0) >= -tol * scale;
}

HermitianMatrix partial_trace(const HermitianMatrix& m, std::span<const Index> dims,
                              std::size_t site) {
  require(!dims.empty() && site < dims.size(), ErrorKind::InvalidInput,
          "partial trace site out of range");
  Index total = 1;
  for (Index d : dims) {
    require(d >= 1, ErrorKind::InvalidInput, "local dimensions must be positive");
    total *= d;
  }
  require(total == m.dim(), ErrorKind::InvalidInput,
          "product of local dimensions " + std::to_string(total) +
              " does not match matrix dimension " + std::to_string(m.dim()));
  Index left = 1, right = 1;
  for (std::size_t k = 0; k < site; ++k) left *= dims[k];
  for (std::size_t k = site + 1; k < dims.size(); ++k) right *= dims[k];
  const Index mid = dims[site];
  const Index out_dim = left * right;
  const ComplexMatrix& a = m.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
  for (Index l = 0; l < left; ++l)
    for (Index r = 0; r < right; ++r)
      for (Index lp = 0; lp < left; ++lp)
        for (Index rp = 0; rp < right; ++rp) {
          Complex acc = 0.0;
          for (Index k = 0; k < mid; ++k)
            acc += a((l * mid + k) * right + r, (lp * mid + k) * right + rp);
          out(l * right + r, lp * right + rp) = acc;
        }
  return HermitianMatrix::hermitian_part(out);
}

HermitianMatrix partial_transpose(const HermitianMatrix& m, Index d, Index s) {
  require(d >= 1 && s >= 1 && d * s == m.dim(), ErrorKind::InvalidInput,
          "partial transpose dimensions do not match");
  const ComplexMatrix& a = m.matrix();
  ComplexMatrix out(m.dim(), m.dim());
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < s; ++k)
        for (Index l = 0; l < s; ++l) out(i * s + k, j * s + l) = a(i * s + l, j * s + k);
  return HermitianMatrix::hermitian_part(out);
}

ComplexMatrix realign(const ComplexMatrix& m, Index d, Index s) {
  require(m.rows() == m.cols() && d >= 1 && s >= 1 && d * s == m.rows(),
          ErrorKind::InvalidInput, "realignment dimensions do not match");
  ComplexMatrix r(d * d, s * s);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < s; ++k)
        for (Index l = 0; l < s; ++l) r(i * d + j, k * s + l) = m(i * s + k, j * s + l);
  return r;
}

RealVector singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

Index numerical_rank(const ComplexMatrix& m, double rel_tol) {
  const RealVector sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_tol * sv(0);
  return static_cast<Index>(std::count_if(sv.begin(), sv.end(), [&](double x) { return x >= cut; }));
}

std::vector<HermitianMatrix> hermitian_basis(Index n) {
  std::vector<HermitianMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  const double r = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < n; ++j) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(j, j) = 1.0;
    basis.push_back(HermitianMatrix::hermitian_part(e));
  }
  for (Index j = 0; j < n; ++j)
    for (Index k = j + 1; k < n; ++k) {
      ComplexMatrix e = ComplexMatrix::Zero(n, n);
      e(j, k) = r;
      e(k, j) = r;
      basis.push_back(HermitianMatrix::hermitian_part(e));
    }
  for (Index j = 0; j < n; ++j)
    for (Index k = j + 1; k < n; ++k) {
      ComplexMatrix e = ComplexMatrix::Zero(n, n);
      e(j, k) = Complex(0.0, r);
      e(k, j) = Complex(0.0, -r);
      basis.push_back(HermitianMatrix::hermitian_part(e));
    }
  return basis;
}

}  // namespace freeconvex
