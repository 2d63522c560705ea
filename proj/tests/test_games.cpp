#include <doctest.h>

#include "freeconvex/games.hpp"
#include "support.hpp"

using namespace freeconvex;

namespace {

NonlocalGame constant_game(std::uint8_t v) { return NonlocalGame(2, 2, 2, 2, std::vector<std::uint8_t>(16, v)); }

// Every (Alice, Bob) deterministic pair, no best-response shortcut.
double brute_force_value(const NonlocalGame& g) {
  const Index qa = g.alice_questions(), qb = g.bob_questions(), aa = g.alice_answers(), ab = g.bob_answers();
  long long na = 1, nb = 1;
  for (Index i = 0; i < qa; ++i) na *= aa;
  for (Index i = 0; i < qb; ++i) nb *= ab;
  double best = 0.0;
  for (long long ca = 0; ca < na; ++ca)
    for (long long cb = 0; cb < nb; ++cb) {
      double v = 0.0;
      for (Index a = 0; a < qa; ++a)
        for (Index b = 0; b < qb; ++b) {
          long long xa = ca, yb = cb;
          for (Index k = 0; k < a; ++k) xa /= aa;
          for (Index k = 0; k < b; ++k) yb /= ab;
          if (g.wins(a, b, xa % aa, yb % ab)) v += g.question_prob(a, b);
        }
      best = std::max(best, v);
    }
  return best;
}

NonlocalGame random_game(Rng& rng, Index qa, Index qb, Index aa, Index ab) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::uint8_t> w(static_cast<std::size_t>(qa * qb * aa * ab));
  for (auto& x : w) x = u(rng) < 0.5;
  RealMatrix pi = RealMatrix::NullaryExpr(qa, qb, [&] { return u(rng) + 0.1; });
  pi /= pi.sum();
  pi(0, 0) += 1.0 - pi.sum();
  return NonlocalGame(qa, qb, aa, ab, std::move(w), pi);
}

QuantumStrategy random_strategy(Rng& rng, Index qa, Index qb, Index aa, Index ab, Index d) {
  std::vector<Povm> alice, bob;
  for (Index a = 0; a < qa; ++a) alice.emplace_back(fctest::random_povm_effects(d, aa, rng));
  for (Index b = 0; b < qb; ++b) bob.emplace_back(fctest::random_povm_effects(d, ab, rng));
  return QuantumStrategy(random_density(d * d, rng), std::move(alice), std::move(bob));
}

double max_constraint_violation(const SdpProblem& p, const HermitianMatrix& x) {
  double worst = 0.0;
  for (const auto& c : p.constraints) worst = std::max(worst, std::abs(trace_inner(c.coefficients[0], x) - c.rhs));
  return worst;
}

}  // namespace

TEST_CASE("classical values") {
  CHECK(classical_value(chsh_game()).value == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(brute_force_value(chsh_game()) == doctest::Approx(0.75));
  CHECK(classical_value(constant_game(1)).value == 1.0);
  CHECK(classical_value(constant_game(0)).value == 0.0);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const NonlocalGame g = random_game(rng, 2 + t % 2, 3, 2, 2 + t % 2);
    const ClassicalValue cv = classical_value(g);
    CHECK(cv.value == doctest::Approx(brute_force_value(g)).epsilon(1e-12));
    CHECK(game_value(g, deterministic_table(g, cv.strategy)) == doctest::Approx(cv.value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(classical_value(NonlocalGame(12, 12, 4, 4, std::vector<std::uint8_t>(12 * 12 * 16, 0))), Error);
}

TEST_CASE("randomized classical strategies do not beat deterministic ones") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const NonlocalGame g = random_game(rng, 2, 2, 2, 2);
    const double best = classical_value(g).value;
    // Product of local mixed strategies p(x|a) q(y|b).
    std::vector<double> p(16);
    RealMatrix alice(2, 2), bob(2, 2);
    for (Index a = 0; a < 2; ++a) {
      alice(a, 0) = u(rng);
      alice(a, 1) = 1 - alice(a, 0);
      bob(a, 0) = u(rng);
      bob(a, 1) = 1 - bob(a, 0);
    }
    for (Index a = 0; a < 2; ++a)
      for (Index b = 0; b < 2; ++b)
        for (Index x = 0; x < 2; ++x)
          for (Index y = 0; y < 2; ++y) p[g.offset(a, b, x, y)] = alice(a, x) * bob(b, y);
    CHECK(game_value(g, CorrelationTable(2, 2, 2, 2, p)) <= best + 1e-12);
  }
}

TEST_CASE("quantum strategies") {
  const CorrelationTable chsh = correlation_of_quantum_strategy(chsh_optimal_strategy());
  CHECK(game_value(chsh_game(), chsh) == doctest::Approx((2.0 + std::sqrt(2.0)) / 4.0).epsilon(1e-12));

  // Deterministic projective measurements reproduce product tables.
  const auto e0 = HermitianMatrix::diagonal(RealVector{{1.0, 1.0}});
  const auto zero = HermitianMatrix::zero(2);
  Rng rng(3);
  const QuantumStrategy det(random_density(4, rng), {Povm({e0, zero}), Povm({zero, e0})}, {Povm({zero, e0}), Povm({e0, zero})});
  const CorrelationTable t = correlation_of_quantum_strategy(det);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b)
      for (Index x = 0; x < 2; ++x)
        for (Index y = 0; y < 2; ++y)
          CHECK(t(a, b, x, y) == doctest::Approx((x == a ? 1.0 : 0.0) * (y == 1 - b ? 1.0 : 0.0)));

  for (int trial = 0; trial < 10; ++trial) {
    const CorrelationTable r = correlation_of_quantum_strategy(random_strategy(rng, 2, 3, 3, 2, 2));
    for (Index a = 0; a < 2; ++a)
      for (Index b = 0; b < 3; ++b) {
        double sum = 0.0;
        for (Index x = 0; x < 3; ++x)
          for (Index y = 0; y < 2; ++y) {
            CHECK(r(a, b, x, y) >= 0.0);
            sum += r(a, b, x, y);
          }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
  }
  CHECK_THROWS_AS(QuantumStrategy(HermitianMatrix::identity(4), {Povm({e0, zero})}, {Povm({e0, zero})}), Error);
}

TEST_CASE("classical polytope membership") {
  const NonlocalGame g = chsh_game();
  const auto det = classical_membership(deterministic_table(g, {{1, 0}, {0, 1}}));
  REQUIRE(det.member);
  REQUIRE(det.weights.size() == 1);
  CHECK(det.weights[0].second == doctest::Approx(1.0));

  const auto uniform = classical_membership(CorrelationTable(2, 2, 2, 2, std::vector<double>(16, 0.25)));
  REQUIRE(uniform.member);
  CHECK(uniform.reconstruction_error <= 1e-8);

  const auto quantum = classical_membership(correlation_of_quantum_strategy(chsh_optimal_strategy()));
  REQUIRE_FALSE(quantum.member);
  CHECK(quantum.certificate.margin() > 0.1);
  CHECK(quantum.certificate.value > quantum.certificate.classical_max);

  // Mixtures of deterministic strategies are reproduced to 1e-8.
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const NonlocalGame h = random_game(rng, 2, 3, 2, 2);
    std::vector<double> p(h.win_table().size(), 0.0);
    double total = 0.0;
    std::vector<std::pair<DeterministicStrategy, double>> mix;
    for (int k = 0; k < 4; ++k) {
      DeterministicStrategy s{{static_cast<Index>(u(rng) * 2), static_cast<Index>(u(rng) * 2)},
                              {static_cast<Index>(u(rng) * 2), static_cast<Index>(u(rng) * 2), static_cast<Index>(u(rng) * 2)}};
      const double w = u(rng) + 0.05;
      mix.emplace_back(s, w);
      total += w;
    }
    for (const auto& [s, w] : mix) {
      const CorrelationTable d = deterministic_table(h, s);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += w / total * d.values()[i];
    }
    const auto m = classical_membership(CorrelationTable(2, 3, 2, 2, p));
    REQUIRE(m.member);
    CHECK(m.reconstruction_error <= 1e-8);
    std::vector<double> rebuilt(p.size(), 0.0);
    for (const auto& [s, w] : m.weights) {
      const CorrelationTable d = deterministic_table(h, s);
      for (std::size_t i = 0; i < p.size(); ++i) rebuilt[i] += w * d.values()[i];
    }
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(rebuilt[i] - p[i]) <= 1e-8);
  }
}

TEST_CASE("NPA word sets") {
  const NonlocalGame g = chsh_game();
  const auto one = npa_words(g, 1);
  const auto two = npa_words(g, 2);
  CHECK(one.size() == 5);
  CHECK(two.size() == 13);
  for (const auto& w : one) CHECK(std::find(two.begin(), two.end(), w) != two.end());
  CHECK(npa_relaxation(g, 1).block_dims == std::vector<Index>{5});
  CHECK_THROWS_AS(npa_words(g, 4), Error);
  CHECK_THROWS_AS(npa_words(NonlocalGame(40, 40, 3, 3, std::vector<std::uint8_t>(40 * 40 * 9, 0)), 3), Error);
}

TEST_CASE("NPA bounds") {
  const auto chsh = npa_upper_bound(chsh_game(), 1);
  CHECK(chsh.objective_bound == doctest::Approx(0.8535534).epsilon(1e-4));
  CHECK(chsh.objective_bound >= (2.0 + std::sqrt(2.0)) / 4.0 - 1e-6);
  CHECK(chsh.moment_matrix(0, 0).real() == doctest::Approx(1.0));
  CHECK(min_eigenvalue(chsh.moment_matrix) >= -1e-7);
  CHECK(npa_upper_bound(constant_game(1), 2).objective_bound == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(npa_upper_bound(constant_game(0), 1).objective_bound) <= 1e-6);

  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    const NonlocalGame g = random_game(rng, 2, 2, 2, 2);
    const double b1 = npa_upper_bound(g, 1).objective_bound;
    const double b2 = npa_upper_bound(g, 2).objective_bound;
    CHECK(b2 <= b1 + 1e-6);
    CHECK(classical_value(g).value <= b2 + 1e-6);
  }
}

TEST_CASE("sandwich: classical <= explicit quantum <= NPA") {
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const NonlocalGame g = random_game(rng, 2, 2, 2, 2);
    const double quantum = game_value(g, correlation_of_quantum_strategy(random_strategy(rng, 2, 2, 2, 2, 2)));
    const double classical = classical_value(g).value;
    const double bound = npa_upper_bound(g, 2).objective_bound;
    CHECK(quantum <= bound + 1e-5);
    CHECK(classical <= bound + 1e-5);
  }
  const NonlocalGame chsh = chsh_game();
  const double q = game_value(chsh, correlation_of_quantum_strategy(chsh_optimal_strategy()));
  CHECK(classical_value(chsh).value <= q);
  CHECK(q <= npa_upper_bound(chsh, 1).objective_bound + 1e-5);
}

TEST_CASE("moment matrix of an explicit strategy is feasible") {
  const NonlocalGame g = chsh_game();
  for (int level = 1; level <= 2; ++level) {
    const HermitianMatrix m = npa_moment_of_strategy(g, chsh_optimal_strategy(), level);
    const SdpProblem p = npa_relaxation(g, level);
    CHECK(min_eigenvalue(m) >= -1e-10);
    CHECK(max_constraint_violation(p, m) <= 1e-10);
    CHECK(-trace_inner(p.objective[0], m) == doctest::Approx((2.0 + std::sqrt(2.0)) / 4.0).epsilon(1e-10));
  }
  Rng rng(7);
  for (int t = 0; t < 3; ++t) {
    const NonlocalGame h = random_game(rng, 2, 2, 3, 2);
    const QuantumStrategy s = random_strategy(rng, 2, 2, 3, 2, 2);
    const HermitianMatrix m = npa_moment_of_strategy(h, s, 2);
    const SdpProblem p = npa_relaxation(h, 2);
    CHECK(min_eigenvalue(m) >= -1e-10);
    CHECK(max_constraint_violation(p, m) <= 1e-10);
    CHECK(-trace_inner(p.objective[0], m) == doctest::Approx(game_value(h, correlation_of_quantum_strategy(s))).epsilon(1e-10));
  }
}
