#include <doctest.h>

#include "freeconvex/conesolve.hpp"
#include "support.hpp"

using namespace freeconvex;

namespace {

// minimize t s.t. t I - H = S, S psd: blocks [t (1x1), S (n x n)].
SdpProblem lambda_max_problem(const HermitianMatrix& h) {
  const Index n = h.dim();
  SdpProblem p;
  p.block_dims = {1, n};
  p.objective = {HermitianMatrix::identity(1), HermitianMatrix()};
  for (const auto& e : hermitian_basis(n)) {
    // <E, tI - S> = <E, H>
    p.constraints.push_back({{HermitianMatrix::diagonal(RealVector::Constant(1, e.trace())), -e},
                             trace_inner(e, h)});
  }
  return p;
}

SdpProblem trace_problem(Index n, double rhs) {
  SdpProblem p;
  p.block_dims = {n};
  p.constraints.push_back({{HermitianMatrix::identity(n)}, rhs});
  return p;
}

}  // namespace

TEST_CASE("lambda_max SDP matches eigenvalues") {
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    const HermitianMatrix h = random_hermitian(5, rng);
    const SdpSolution s = solve(lambda_max_problem(h));
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(s.primal_objective == doctest::Approx(fctest::jacobi_eigenvalues(h.matrix())(4)).epsilon(1e-6));
    const SdpResiduals r = certify(lambda_max_problem(h), s.blocks, s.dual_multipliers);
    CHECK(r.primal_feas <= 1e-7);
    CHECK(r.gap <= 1e-6);
    CHECK(s.primal_objective >= s.dual_objective - 1e-6);
  }
}

TEST_CASE("trace-normalized feasibility") {
  const SdpSolution s = solve(trace_problem(3, 1.0));
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.blocks[0].trace() == doctest::Approx(1.0));
  CHECK(is_psd(s.blocks[0]));
}

TEST_CASE("negative trace is certified infeasible") {
  const SdpProblem p = trace_problem(3, -1.0);
  const SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Infeasible);
  REQUIRE(s.certificate.has_value());
  CHECK(s.certificate->residual <= 1e-6);
  CHECK(certificate_residual(p, s.certificate->ray) <= 1e-6);
}

TEST_CASE("inconsistent equalities are infeasible") {
  SdpProblem p = trace_problem(2, 1.0);
  p.constraints.push_back({{HermitianMatrix::identity(2)}, 2.0});
  const SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::Infeasible);
  REQUIRE(s.certificate.has_value());
  CHECK(certificate_residual(p, s.certificate->ray) <= 1e-6);
}

TEST_CASE("validation rejects inconsistent shapes") {
  SdpProblem p = trace_problem(2, 1.0);
  p.constraints.push_back({{HermitianMatrix::identity(3)}, 1.0});
  CHECK_THROWS_AS(validate(p), Error);
  SdpProblem q = trace_problem(2, 1.0);
  q.constraints[0].rhs = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate(q), Error);
}

TEST_CASE("project_psd examples and properties") {
  const PsdProjection p = project_psd(HermitianMatrix::diagonal(RealVector{{2.0, -1.0}}));
  CHECK(p.projected.matrix().isApprox(HermitianMatrix::diagonal(RealVector{{2.0, 0.0}}).matrix()));
  CHECK(p.negative_trace == doctest::Approx(1.0));
  Rng rng(4);
  const HermitianMatrix psd = fctest::random_psd(4, rng);
  CHECK((project_psd(psd).projected.matrix() - psd.matrix()).norm() <= 1e-12 * (1 + psd.norm()));
  for (int t = 0; t < 50; ++t) {
    const HermitianMatrix a = random_hermitian(5, rng), b = random_hermitian(5, rng);
    const PsdProjection pa = project_psd(a), pb = project_psd(b);
    CHECK(pa.negative_trace == doctest::Approx(fctest::oracle_negative_trace(a.matrix())).epsilon(1e-10));
    CHECK((project_psd(pa.projected).projected.matrix() - pa.projected.matrix()).norm() <= 1e-12 * (1 + a.norm()));
    CHECK((pa.projected.matrix() - pb.projected.matrix()).norm() <= (a.matrix() - b.matrix()).norm() + 1e-12);
  }
}
