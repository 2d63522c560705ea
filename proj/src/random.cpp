#include "freeconvex/random.hpp"

namespace freeconvex {

ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = Complex(n01(rng), n01(rng));
  return g;
}

ComplexVector random_unit_vector(Index n, Rng& rng) {
  ComplexVector v = random_gaussian(n, 1, rng);
  return v / v.norm();
}

HermitianMatrix random_hermitian(Index n, Rng& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  return HermitianMatrix::hermitian_part(g);
}

HermitianMatrix random_density(Index n, Rng& rng, Index rank) {
  const ComplexMatrix g = random_gaussian(n, rank > 0 ? rank : n, rng);
  ComplexMatrix r = g * g.adjoint();
  r /= r.trace().real();
  return HermitianMatrix::hermitian_part(r);
}

ComplexMatrix random_unitary(Index n, Rng& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace freeconvex
