#pragma once

#include <cstdint>
#include <vector>

#include "freeconvex/conesolve.hpp"
#include "freeconvex/magic.hpp"

namespace freeconvex {

/// Two-player one-round game. Alice gets question a and answers x, Bob gets b
/// and answers y; they win when w(a,b,x,y) = 1.
class NonlocalGame {
 public:
  /// `win` is indexed ((a*qb + b)*aa + x)*ab + y; `pi` is qa x qb.
  NonlocalGame(Index qa, Index qb, Index aa, Index ab, std::vector<std::uint8_t> win, RealMatrix pi);
  /// Same game under the uniform question distribution.
  NonlocalGame(Index qa, Index qb, Index aa, Index ab, std::vector<std::uint8_t> win);

  Index alice_questions() const { return qa_; }
  Index bob_questions() const { return qb_; }
  Index alice_answers() const { return aa_; }
  Index bob_answers() const { return ab_; }
  bool wins(Index a, Index b, Index x, Index y) const { return win_[offset(a, b, x, y)] != 0; }
  double question_prob(Index a, Index b) const { return pi_(a, b); }
  const RealMatrix& question_distribution() const { return pi_; }
  const std::vector<std::uint8_t>& win_table() const { return win_; }

  std::size_t offset(Index a, Index b, Index x, Index y) const {
    return static_cast<std::size_t>(((a * qb_ + b) * aa_ + x) * ab_ + y);
  }

 private:
  Index qa_, qb_, aa_, ab_;
  std::vector<std::uint8_t> win_;
  RealMatrix pi_;
};

/// CHSH: uniform questions in {0,1}^2, win iff x xor y = a and b.
NonlocalGame chsh_game();

/// p(x,y|a,b) with the same indexing as NonlocalGame's win table.
class CorrelationTable {
 public:
  CorrelationTable(Index qa, Index qb, Index aa, Index ab, std::vector<double> p);

  Index alice_questions() const { return qa_; }
  Index bob_questions() const { return qb_; }
  Index alice_answers() const { return aa_; }
  Index bob_answers() const { return ab_; }
  double operator()(Index a, Index b, Index x, Index y) const {
    return p_[static_cast<std::size_t>(((a * qb_ + b) * aa_ + x) * ab_ + y)];
  }
  const std::vector<double>& values() const { return p_; }

 private:
  Index qa_, qb_, aa_, ab_;
  std::vector<double> p_;
};

/// Winning probability sum pi(a,b) w(a,b,x,y) p(x,y|a,b).
double game_value(const NonlocalGame& g, const CorrelationTable& p);

struct DeterministicStrategy {
  std::vector<Index> alice;  // answer per Alice question
  std::vector<Index> bob;
};

CorrelationTable deterministic_table(const NonlocalGame& g, const DeterministicStrategy& s);

struct ClassicalValue {
  double value = 0.0;
  DeterministicStrategy strategy;
};

inline constexpr double kClassicalEnumerationCap = 1e7;

/// Exact classical value: every Alice strategy paired with Bob's best response.
ClassicalValue classical_value(const NonlocalGame& g);

/// Shared state on C^d (x) C^s, one POVM per question on each side.
class QuantumStrategy {
 public:
  QuantumStrategy(HermitianMatrix state, std::vector<Povm> alice, std::vector<Povm> bob);

  const HermitianMatrix& state() const { return state_; }
  const std::vector<Povm>& alice() const { return alice_; }
  const std::vector<Povm>& bob() const { return bob_; }
  Index alice_dim() const { return alice_.front().dim(); }
  Index bob_dim() const { return bob_.front().dim(); }

 private:
  HermitianMatrix state_;
  std::vector<Povm> alice_, bob_;
};

/// Maximally entangled qubit pair, Alice measuring at angles 0 and pi/4, Bob
/// at +pi/8 and -pi/8.
QuantumStrategy chsh_optimal_strategy();

CorrelationTable correlation_of_quantum_strategy(const QuantumStrategy& s);

struct BellInequality {
  std::vector<double> coefficients;  // same indexing as CorrelationTable
  double classical_max = 0.0;        // max over deterministic tables
  double value = 0.0;                // value on the tested table
  double margin() const { return value - classical_max; }
};

struct ClassicalMembership {
  bool member = false;
  std::vector<std::pair<DeterministicStrategy, double>> weights;
  double reconstruction_error = 0.0;  // max |sum q D - p| when member
  BellInequality certificate;         // filled when not a member
};

inline constexpr double kMembershipStrategyCap = 4096;

/// LP over mixtures of deterministic tables; on infeasibility a separating
/// functional with coefficients in [-1, 1].
ClassicalMembership classical_membership(const CorrelationTable& p);

/// Word in projective generators: Alice letters then Bob letters, each letter
/// (question, answer) with the last answer of every question eliminated.
struct NpaWord {
  std::vector<std::pair<Index, Index>> alice;
  std::vector<std::pair<Index, Index>> bob;
  std::size_t length() const { return alice.size() + bob.size(); }
  auto operator<=>(const NpaWord&) const = default;
};

std::string to_string(const NpaWord& w);

inline constexpr std::size_t kNpaWordCap = 3000;

/// Index set of the level-`level` moment matrix, shortest words first.
std::vector<NpaWord> npa_words(const NonlocalGame& g, int level);

/// Moment-matrix SDP with one Hermitian block; minimizing its objective gives
/// minus the upper bound on the quantum value.
SdpProblem npa_relaxation(const NonlocalGame& g, int level);

struct NpaCertificate {
  int level = 0;
  std::vector<NpaWord> words;
  HermitianMatrix moment_matrix;
  double objective_bound = 0.0;
  SdpStatus status = SdpStatus::MaxIterations;
  SdpResiduals residuals;
};

/// Throws Error(Indeterminate) when the solver does not reach optimality.
NpaCertificate npa_upper_bound(const NonlocalGame& g, int level, const SdpOptions& opts = {});

/// Moment matrix phi(u^dagger v) of an explicit strategy, with POVMs replaced
/// by Naimark-dilated projections first.
HermitianMatrix npa_moment_of_strategy(const NonlocalGame& g, const QuantumStrategy& s, int level);

}  // namespace freeconvex
