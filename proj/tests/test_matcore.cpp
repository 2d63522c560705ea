#include <doctest.h>

#include <array>

#include "support.hpp"

using namespace freeconvex;
using fctest::unit_matrix;

TEST_CASE("hermitian construction checks asymmetry") {
  ComplexMatrix m(2, 2);
  m << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
  CHECK_NOTHROW(HermitianMatrix{m});
  m(0, 1) += 1e-6;
  CHECK_THROWS_AS(HermitianMatrix{m}, Error);
  ComplexMatrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(HermitianMatrix{rect}, Error);
  ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(HermitianMatrix{bad}, Error);
}

TEST_CASE("hermitian construction symmetrizes within tolerance") {
  ComplexMatrix m(2, 2);
  m << Complex(1.0, 1e-14), 0.5, 0.5 + 1e-13, 1.0;
  const HermitianMatrix h(m);
  CHECK(h(0, 0).imag() == 0.0);
  CHECK(h(0, 1) == std::conj(h(1, 0)));
}

TEST_CASE("eigh examples") {
  const auto id = eigh(HermitianMatrix::identity(3));
  CHECK(id.eigenvalues.isApprox(RealVector::Ones(3)));
  const auto d = eigvalsh(HermitianMatrix::diagonal(RealVector{{3.0, 1.0}}));
  CHECK(d(0) == doctest::Approx(1.0));
  CHECK(d(1) == doctest::Approx(3.0));
}

TEST_CASE("eigh reconstruction, unitarity and Jacobi agreement") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + trial % 9;
    const HermitianMatrix h = random_hermitian(n, rng);
    const auto e = eigh(h);
    const ComplexMatrix rebuilt = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.adjoint();
    CHECK((rebuilt - h.matrix()).norm() <= 1e-10 * (1.0 + h.norm()));
    CHECK((e.eigenvectors.adjoint() * e.eigenvectors - ComplexMatrix::Identity(n, n)).norm() <= 1e-10);
    for (Index i = 1; i < n; ++i) CHECK(e.eigenvalues(i - 1) <= e.eigenvalues(i));
    CHECK((e.eigenvalues - fctest::jacobi_eigenvalues(h.matrix())).norm() <= 1e-9 * (1.0 + h.norm()));
  }
}

TEST_CASE("kron examples and mixed product") {
  CHECK(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)).isApprox(ComplexMatrix::Identity(6, 6)));
  CHECK(kron(unit_matrix(2, 0, 0), unit_matrix(2, 0, 0)) == unit_matrix(4, 0, 0));
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_gaussian(2, 2, rng), b = random_gaussian(2, 2, rng);
    const ComplexMatrix c = random_gaussian(2, 2, rng), d = random_gaussian(2, 2, rng);
    CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() <= 1e-12 * (1 + kron(a, b).norm() * kron(c, d).norm()));
    CHECK((kron(a, b) - fctest::kron_loops(a, b)).norm() == 0.0);
    const ComplexMatrix r = random_gaussian(3, 2, rng);
    CHECK((kron(a + c, r) - kron(a, r) - kron(c, r)).norm() <= 1e-12 * (1 + kron(a, r).norm()));
  }
  CHECK_THROWS_AS(kron(ComplexMatrix::Identity(100, 100), ComplexMatrix::Identity(100, 100)), Error);
  try {
    kron(ComplexMatrix::Identity(100, 100), ComplexMatrix::Identity(100, 100));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeLimit);
  }
}

TEST_CASE("is_psd examples and agreement with eigenvalues") {
  CHECK(is_psd(HermitianMatrix::identity(4), 1e-9));
  CHECK_FALSE(is_psd(HermitianMatrix::diagonal(RealVector{{1.0, -1e-3}}), 1e-9));
  Rng rng(11);
  for (int t = 0; t < 20; ++t) CHECK(is_psd(fctest::random_psd(5, rng, 2)));
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    const HermitianMatrix h = random_hermitian(4, rng) + HermitianMatrix::identity(4) * 2.5;
    const RealVector ev = fctest::jacobi_eigenvalues(h.matrix());
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (std::abs(ev(0)) < 1e-7 * scale) {
      ++agree;
      continue;
    }
    agree += is_psd(h) == (ev(0) >= 0.0);
  }
  CHECK(agree == 1000);
}

TEST_CASE("partial trace") {
  Rng rng(5);
  const HermitianMatrix a = random_hermitian(2, rng), b = random_hermitian(3, rng);
  const std::array<Index, 2> dims{2, 3};
  CHECK((partial_trace(kron(a, b), dims, 1).matrix() - b.trace() * a.matrix()).norm() <= 1e-12);
  CHECK((partial_trace(kron(a, b), dims, 0).matrix() - a.trace() * b.matrix()).norm() <= 1e-12);
  const std::array<Index, 2> qubits{2, 2};
  CHECK(partial_trace(HermitianMatrix::identity(4), qubits, 0).matrix().isApprox(2.0 * ComplexMatrix::Identity(2, 2)));
  ComplexMatrix omega = ComplexMatrix::Zero(4, 4);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) omega += kron(unit_matrix(2, i, j), unit_matrix(2, i, j));
  CHECK(partial_trace(HermitianMatrix(omega), qubits, 1).matrix().isApprox(ComplexMatrix::Identity(2, 2)));

  const std::array<Index, 3> three{2, 3, 2};
  const HermitianMatrix m = random_hermitian(12, rng);
  const auto first_then = partial_trace(partial_trace(m, three, 0), std::array<Index, 2>{3, 2}, 1);
  const auto last_then = partial_trace(partial_trace(m, three, 2), std::array<Index, 2>{2, 3}, 0);
  CHECK((first_then.matrix() - last_then.matrix()).norm() <= 1e-12 * (1 + m.norm()));
  CHECK(partial_trace(m, three, 1).trace() == doctest::Approx(m.trace()).epsilon(1e-12));
  CHECK_THROWS_AS(partial_trace(m, qubits, 0), Error);
}

TEST_CASE("partial transpose") {
  Rng rng(9);
  const HermitianMatrix a = random_hermitian(2, rng), b = random_hermitian(2, rng);
  const HermitianMatrix bt(b.matrix().transpose());
  CHECK((partial_transpose(kron(a, b), 2, 2).matrix() - kron(a, bt).matrix()).norm() <= 1e-14);
  const HermitianMatrix m = random_hermitian(6, rng);
  CHECK((partial_transpose(partial_transpose(m, 2, 3), 2, 3).matrix() - m.matrix()).norm() == 0.0);
  ComplexMatrix omega = ComplexMatrix::Zero(4, 4);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) omega += 0.5 * kron(unit_matrix(2, i, j), unit_matrix(2, i, j));
  CHECK(fctest::oracle_min_eig(partial_transpose(HermitianMatrix(omega), 2, 2)) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(partial_transpose(m, 2, 2), Error);
}

TEST_CASE("realignment and operator Schmidt rank") {
  Rng rng(13);
  const ComplexMatrix a = random_gaussian(2, 2, rng), b = random_gaussian(3, 3, rng);
  const ComplexMatrix r = realign(kron(a, b), 2, 3);
  CHECK(r.rows() == 4);
  CHECK(r.cols() == 9);
  CHECK(numerical_rank(r) == 1);
  // R[(i,j),(k,l)] = M[(i,k),(j,l)] = a(i,j) b(k,l)
  CHECK(r(1 * 2 + 0, 2 * 3 + 1) == a(1, 0) * b(2, 1));
  const ComplexMatrix two = kron(unit_matrix(2, 0, 0), unit_matrix(2, 0, 0)) + kron(unit_matrix(2, 1, 1), unit_matrix(2, 1, 1));
  CHECK(numerical_rank(realign(two, 2, 2)) == 2);
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix m = ComplexMatrix::Zero(9, 9);
    for (int k = 0; k < 3; ++k) m += kron(random_hermitian(3, rng).matrix(), random_hermitian(3, rng).matrix());
    const RealVector sv = singular_values(realign(m, 3, 3));
    CHECK(sv(2) > 1e-6 * sv(0));
    CHECK(sv(3) < 1e-12 * sv(0));
    CHECK(numerical_rank(realign(m, 3, 3)) == 3);
  }
}

TEST_CASE("hermitian basis is orthonormal") {
  const auto basis = hermitian_basis(3);
  REQUIRE(basis.size() == 9);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      CHECK(trace_inner(basis[i], basis[j]) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("psd square root squares back") {
  Rng rng(17);
  const HermitianMatrix p = fctest::random_psd(5, rng, 3);
  const HermitianMatrix r = psd_sqrt(p);
  CHECK((r.matrix() * r.matrix() - p.matrix()).norm() <= 1e-10 * (1 + p.norm()));
  CHECK_THROWS_AS(psd_sqrt(HermitianMatrix::diagonal(RealVector{{1.0, -0.1}})), Error);
}
