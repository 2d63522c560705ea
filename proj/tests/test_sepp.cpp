#include <doctest.h>

#include "freeconvex/sepp.hpp"
#include "support.hpp"

using namespace freeconvex;
using fctest::unit_matrix;

namespace {

std::vector<ComplexMatrix> identity_images(Index d) {
  std::vector<ComplexMatrix> out;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out.push_back(unit_matrix(d, i, j));
  return out;
}

std::vector<ComplexMatrix> transpose_images(Index d) {
  std::vector<ComplexMatrix> out;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out.push_back(unit_matrix(d, j, i));
  return out;
}

void check_decomposition(const std::vector<ProductTerm>& terms, const ComplexMatrix& rho) {
  CHECK(terms.size() <= 2);
  ComplexMatrix sum = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& [a, b] : terms) {
    CHECK(fctest::oracle_min_eig(a) >= -1e-9);
    CHECK(fctest::oracle_min_eig(b) >= -1e-9);
    sum += fctest::kron_loops(a.matrix(), b.matrix());
  }
  CHECK(fctest::rel_fro(sum, rho) <= 1e-8);
}

}  // namespace

TEST_CASE("Choi matrices of standard maps") {
  const ChoiMatrix id = choi_of_map(identity_images(2), 2, 2);
  CHECK(is_completely_positive(id));
  CHECK(numerical_rank(id.matrix().matrix()) == 1);
  const ChoiMatrix t = choi_of_map(transpose_images(2), 2, 2);
  CHECK(fctest::oracle_min_eig(t.matrix()) == doctest::Approx(-1.0));
  CHECK_FALSE(is_completely_positive(t));
  std::vector<ComplexMatrix> trace_images;
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) trace_images.push_back(i == j ? ComplexMatrix(ComplexMatrix::Identity(2, 2) / 2.0) : ComplexMatrix::Zero(2, 2));
  const ChoiMatrix tr = choi_of_map(trace_images, 2, 2);
  CHECK(tr.matrix().matrix().isApprox(ComplexMatrix::Identity(4, 4) / 2.0));
  CHECK(is_completely_positive(tr));
}

TEST_CASE("non-Hermiticity-preserving maps are rejected") {
  auto images = identity_images(2);
  images[1] = ComplexMatrix::Identity(2, 2);  // T(E_01) = I but T(E_10) = E_10
  try {
    choi_of_map(images, 2, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidMap);
  }
}

TEST_CASE("Kraus Choi matrices are psd") {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    std::vector<ComplexMatrix> kraus;
    for (int a = 0; a < 3; ++a) kraus.push_back(random_gaussian(3, 2, rng));
    CHECK(is_completely_positive(choi_of_kraus(kraus)));
  }
}

TEST_CASE("block positivity search") {
  Rng rng(1);
  const ChoiMatrix psd(fctest::random_psd(4, rng), 2, 2);
  CHECK_FALSE(block_positivity_search(psd).violation_found);
  const ChoiMatrix swap = choi_of_map(transpose_images(2), 2, 2);
  CHECK_FALSE(block_positivity_search(swap).violation_found);
  CHECK(product_probe_min(swap, 1000, 3) >= -1e-12);
  const ChoiMatrix bad(HermitianMatrix::diagonal(RealVector{{-1.0, 1.0, 1.0, 1.0}}), 2, 2);
  const auto v = block_positivity_search(bad);
  REQUIRE(v.violation_found);
  CHECK(v.value == doctest::Approx(-1.0));
  CHECK(std::norm(v.x(0)) == doctest::Approx(1.0));
  CHECK(std::norm(v.y(0)) == doctest::Approx(1.0));
  CHECK(block_positivity_search(bad, 100, 50, 9).value == doctest::Approx(v.value));
}

TEST_CASE("operator Schmidt decomposition") {
  Rng rng(2);
  const HermitianMatrix a = random_hermitian(2, rng), b = random_hermitian(3, rng);
  const auto one = operator_schmidt(kron(a, b), 2, 3);
  REQUIRE(one.rank == 1);
  // Factors are proportional to a and b: Cauchy-Schwarz holds with equality.
  CHECK(std::abs(std::abs(trace_inner(one.left[0], a)) - one.left[0].norm() * a.norm()) <= 1e-9 * a.norm() * one.left[0].norm());
  CHECK(std::abs(std::abs(trace_inner(one.right[0], b)) - one.right[0].norm() * b.norm()) <= 1e-9 * b.norm() * one.right[0].norm());
  const HermitianMatrix two(kron(unit_matrix(2, 0, 0), unit_matrix(2, 0, 0)) + kron(unit_matrix(2, 1, 1), unit_matrix(2, 1, 1)));
  CHECK(operator_schmidt(two, 2, 2).rank == 2);
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix m = ComplexMatrix::Zero(9, 9);
    for (int k = 0; k < 3; ++k) m += kron(random_hermitian(3, rng).matrix(), random_hermitian(3, rng).matrix());
    const HermitianMatrix rho(m);
    const auto sd = operator_schmidt(rho, 3, 3);
    REQUIRE(sd.rank == 3);
    ComplexMatrix sum = ComplexMatrix::Zero(9, 9);
    for (Index k = 0; k < 3; ++k) sum += kron(sd.left[static_cast<std::size_t>(k)].matrix(), sd.right[static_cast<std::size_t>(k)].matrix());
    CHECK(fctest::rel_fro(sum, m) <= 1e-9);
    for (Index i = 0; i < 3; ++i)
      for (Index j = i + 1; j < 3; ++j) {
        CHECK(std::abs(trace_inner(sd.left[static_cast<std::size_t>(i)], sd.left[static_cast<std::size_t>(j)])) <= 1e-9 * (1 + rho.norm()));
        CHECK(std::abs(trace_inner(sd.right[static_cast<std::size_t>(i)], sd.right[static_cast<std::size_t>(j)])) <= 1e-9 * (1 + rho.norm()));
      }
    const ComplexMatrix u = kron(random_unitary(3, rng), random_unitary(3, rng));
    CHECK(operator_schmidt(HermitianMatrix::hermitian_part(u * m * u.adjoint()), 3, 3).rank == 3);
  }
}

TEST_CASE("two-dimensional psd cones") {
  const auto quadrant = cone_rays_2d(HermitianMatrix::diagonal(RealVector{{1.0, 0.0}}),
                                     HermitianMatrix::diagonal(RealVector{{0.0, 1.0}}));
  REQUIRE(quadrant.kind == ConeKind::Simplex);
  REQUIRE(quadrant.rays.size() == 2);
  CHECK(quadrant.rays[0][0] == doctest::Approx(1.0));
  CHECK(quadrant.rays[0][1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(quadrant.rays[1][0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(quadrant.rays[1][1] == doctest::Approx(1.0));

  const HermitianMatrix id = HermitianMatrix::identity(2), z = HermitianMatrix::diagonal(RealVector{{1.0, -1.0}});
  const auto wedge = cone_rays_2d(id, z);
  REQUIRE(wedge.kind == ConeKind::Simplex);
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<std::array<double, 2>> expected{{r, -r}, {r, r}};
  for (const auto& ray : wedge.rays) {
    bool matched = false;
    for (const auto& e : expected) matched = matched || (std::abs(ray[0] - e[0]) < 1e-9 && std::abs(ray[1] - e[1]) < 1e-9);
    CHECK(matched);
    CHECK(std::abs(min_eigenvalue(ray[0] * id + ray[1] * z)) <= 1e-9);
  }
  const double mid0 = wedge.rays[0][0] + wedge.rays[1][0], mid1 = wedge.rays[0][1] + wedge.rays[1][1];
  CHECK(min_eigenvalue(mid0 * id + mid1 * z) > 1e-6);

  CHECK(cone_rays_2d(id, HermitianMatrix::zero(2)).kind == ConeKind::Nonsalient);
  CHECK(cone_rays_2d(HermitianMatrix::zero(2), HermitianMatrix::zero(2)).kind == ConeKind::Full);
  CHECK(cone_rays_2d(z, HermitianMatrix::from_real(RealMatrix{{0.0, 1.0}, {1.0, 0.0}})).kind == ConeKind::Zero);
  CHECK(cone_rays_2d(id, 2.0 * id).kind == ConeKind::Nonsalient);
  const auto ray = cone_rays_2d(HermitianMatrix::diagonal(RealVector{{1.0, -1.0, 0.0}}),
                                HermitianMatrix::diagonal(RealVector{{0.0, 0.0, 1.0}}));
  CHECK(ray.kind == ConeKind::Ray);
  REQUIRE(ray.rays.size() == 1);
  CHECK(std::abs(ray.rays[0][0]) <= 1e-9);
  CHECK(ray.rays[0][1] == doctest::Approx(1.0));
}

TEST_CASE("rank-two separable decompositions") {
  Rng rng(6);
  const HermitianMatrix s1 = fctest::random_psd(3, rng), s2 = fctest::random_psd(3, rng, 1);
  const HermitianMatrix t1 = fctest::random_psd(3, rng, 2), t2 = fctest::random_psd(3, rng);
  check_decomposition(separable_rank2(s1, t1, s2, t2), (kron(s1, t1) + kron(s2, t2)).matrix());

  const auto collinear = separable_rank2(s1, t1, 2.0 * s1, t2);
  CHECK(collinear.size() == 1);
  check_decomposition(collinear, (kron(s1, t1) + kron(2.0 * s1, t2)).matrix());

  for (int t = 0; t < 100; ++t) {
    const HermitianMatrix a1 = fctest::random_psd(3, rng, 1 + t % 3), a2 = fctest::random_psd(3, rng, 1 + (t / 3) % 3);
    const HermitianMatrix b1 = fctest::random_psd(3, rng, 1 + (t / 9) % 3), b2 = fctest::random_psd(3, rng);
    const HermitianMatrix rho = kron(a1, b1) + kron(a2, b2);
    const auto sd = operator_schmidt(rho, 3, 3);
    REQUIRE(sd.rank == 2);
    check_decomposition(separable_rank2(sd.left[0], sd.right[0], sd.left[1], sd.right[1]), rho.matrix());
  }
}

TEST_CASE("rank-two decomposition requires a psd input") {
  const HermitianMatrix z = HermitianMatrix::diagonal(RealVector{{1.0, -1.0}});
  try {
    separable_rank2(z, z, HermitianMatrix::identity(2), HermitianMatrix::identity(2) * 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolation);
  }
}

TEST_CASE("small separability oracle") {
  Rng rng(10);
  CHECK(separability_oracle_small(kron(random_density(2, rng), random_density(2, rng)), 2, 2) == SeparabilityVerdict::Separable);
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  CHECK(separability_oracle_small(HermitianMatrix::hermitian_part(phi * phi.adjoint()), 2, 2) == SeparabilityVerdict::Entangled);
  CHECK(separability_oracle_small(HermitianMatrix::identity(9) * (1.0 / 9.0), 3, 3) == SeparabilityVerdict::Inconclusive);
  CHECK(separability_oracle_small(kron(random_density(2, rng), random_density(3, rng)), 2, 3) == SeparabilityVerdict::Separable);
}
