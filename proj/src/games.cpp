#include "freeconvex/games.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "freeconvex/lp.hpp"
#include "freeconvex/parallel.hpp"

namespace freeconvex {

namespace {

std::size_t table_size(Index qa, Index qb, Index aa, Index ab) {
  require(qa >= 1 && qb >= 1 && aa >= 1 && ab >= 1, ErrorKind::InvalidInput,
          "question and answer counts must be positive");
  return static_cast<std::size_t>(qa * qb * aa * ab);
}

double power_count(Index base, Index exp) {
  return std::pow(static_cast<double>(base), static_cast<double>(exp));
}

// Digits of `code` in base `base`, least significant first.
std::vector<Index> decode(long long code, Index base, Index digits) {
  std::vector<Index> out(static_cast<std::size_t>(digits));
  for (auto& d : out) {
    d = static_cast<Index>(code % base);
    code /= base;
  }
  return out;
}

}  // namespace

NonlocalGame::NonlocalGame(Index qa, Index qb, Index aa, Index ab, std::vector<std::uint8_t> win,
                           RealMatrix pi)
    : qa_(qa), qb_(qb), aa_(aa), ab_(ab), win_(std::move(win)), pi_(std::move(pi)) {
  require(win_.size() == table_size(qa, qb, aa, ab), ErrorKind::InvalidInput,
          "winning table has the wrong size");
  for (auto v : win_) require(v <= 1, ErrorKind::InvalidInput, "winning table entries must be 0 or 1");
  require(pi_.rows() == qa && pi_.cols() == qb, ErrorKind::InvalidInput,
          "question distribution has the wrong shape");
  require(pi_.allFinite() && pi_.minCoeff() >= 0.0, ErrorKind::InvalidInput,
          "question distribution must be nonnegative");
  require(std::abs(pi_.sum() - 1.0) <= 1e-12, ErrorKind::InvalidInput,
          "question distribution must sum to 1");
}

NonlocalGame::NonlocalGame(Index qa, Index qb, Index aa, Index ab, std::vector<std::uint8_t> win)
    : NonlocalGame(qa, qb, aa, ab, std::move(win),
                   RealMatrix::Constant(std::max<Index>(qa, 0), std::max<Index>(qb, 0),
                                        1.0 / static_cast<double>(std::max<Index>(qa * qb, 1)))) {}

NonlocalGame chsh_game() {
  std::vector<std::uint8_t> win(16);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b)
      for (Index x = 0; x < 2; ++x)
        for (Index y = 0; y < 2; ++y) win[static_cast<std::size_t>(((a * 2 + b) * 2 + x) * 2 + y)] = (x ^ y) == (a & b);
  return NonlocalGame(2, 2, 2, 2, std::move(win));
}

CorrelationTable::CorrelationTable(Index qa, Index qb, Index aa, Index ab, std::vector<double> p)
    : qa_(qa), qb_(qb), aa_(aa), ab_(ab), p_(std::move(p)) {
  require(p_.size() == table_size(qa, qb, aa, ab), ErrorKind::InvalidInput,
          "correlation table has the wrong size");
  const std::size_t block = static_cast<std::size_t>(aa * ab);
  for (std::size_t q = 0; q < p_.size() / block; ++q) {
    double sum = 0.0;
    for (std::size_t k = 0; k < block; ++k) {
      const double v = p_[q * block + k];
      require(std::isfinite(v) && v >= -1e-12, ErrorKind::InvalidInput,
              "correlation table has a negative entry");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::InvalidInput,
            "correlation table is not normalized for every question pair");
  }
}

double game_value(const NonlocalGame& g, const CorrelationTable& p) {
  require(p.alice_questions() == g.alice_questions() && p.bob_questions() == g.bob_questions() &&
              p.alice_answers() == g.alice_answers() && p.bob_answers() == g.bob_answers(),
          ErrorKind::InvalidInput, "table and game sizes differ");
  double v = 0.0;
  for (Index a = 0; a < g.alice_questions(); ++a)
    for (Index b = 0; b < g.bob_questions(); ++b)
      for (Index x = 0; x < g.alice_answers(); ++x)
        for (Index y = 0; y < g.bob_answers(); ++y)
          if (g.wins(a, b, x, y)) v += g.question_prob(a, b) * p(a, b, x, y);
  return v;
}

CorrelationTable deterministic_table(const NonlocalGame& g, const DeterministicStrategy& s) {
  const Index qa = g.alice_questions(), qb = g.bob_questions(), aa = g.alice_answers(),
              ab = g.bob_answers();
  require(static_cast<Index>(s.alice.size()) == qa && static_cast<Index>(s.bob.size()) == qb,
          ErrorKind::InvalidInput, "strategy does not match the game");
  std::vector<double> p(table_size(qa, qb, aa, ab), 0.0);
  for (Index a = 0; a < qa; ++a)
    for (Index b = 0; b < qb; ++b)
      p[g.offset(a, b, s.alice[static_cast<std::size_t>(a)], s.bob[static_cast<std::size_t>(b)])] = 1.0;
  return CorrelationTable(qa, qb, aa, ab, std::move(p));
}

ClassicalValue classical_value(const NonlocalGame& g) {
  const Index qa = g.alice_questions(), qb = g.bob_questions(), aa = g.alice_answers(),
              ab = g.bob_answers();
  const double total = power_count(aa, qa) * power_count(ab, qb);
  require(total <= kClassicalEnumerationCap, ErrorKind::SizeLimit,
          "deterministic strategy count exceeds the enumeration cap");
  const long long alice_count = static_cast<long long>(power_count(aa, qa));

  struct Best {
    double value = -1.0;
    long long code = 0;
  };
  // Bob's best response to a fixed Alice strategy is a per-question argmax.
  auto evaluate = [&](long long code, std::vector<Index>* bob) {
    const auto alice = decode(code, aa, qa);
    double v = 0.0;
    for (Index b = 0; b < qb; ++b) {
      double best = -1.0;
      Index arg = 0;
      for (Index y = 0; y < ab; ++y) {
        double s = 0.0;
        for (Index a = 0; a < qa; ++a)
          if (g.wins(a, b, alice[static_cast<std::size_t>(a)], y)) s += g.question_prob(a, b);
        if (s > best) {
          best = s;
          arg = y;
        }
      }
      v += best;
      if (bob) (*bob)[static_cast<std::size_t>(b)] = arg;
    }
    return v;
  };

  const std::size_t chunks = static_cast<std::size_t>(std::min<long long>(alice_count, 64));
  std::vector<Best> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const long long lo = alice_count * static_cast<long long>(c) / static_cast<long long>(chunks);
    const long long hi = alice_count * static_cast<long long>(c + 1) / static_cast<long long>(chunks);
    Best best;
    for (long long code = lo; code < hi; ++code) {
      const double v = evaluate(code, nullptr);
      if (v > best.value) best = {v, code};
    }
    partial[c] = best;
  });
  Best best;
  for (const auto& b : partial)
    if (b.value > best.value) best = b;

  ClassicalValue out;
  out.strategy.alice = decode(best.code, aa, qa);
  out.strategy.bob.assign(static_cast<std::size_t>(qb), 0);
  out.value = evaluate(best.code, &out.strategy.bob);
  return out;
}

QuantumStrategy::QuantumStrategy(HermitianMatrix state, std::vector<Povm> alice, std::vector<Povm> bob)
    : state_(std::move(state)), alice_(std::move(alice)), bob_(std::move(bob)) {
  require(!alice_.empty() && !bob_.empty(), ErrorKind::InvalidInput,
          "strategy needs at least one question per party");
  for (const auto& side : {&alice_, &bob_})
    for (const auto& p : *side)
      require(p.dim() == side->front().dim() && p.outcomes() == side->front().outcomes(),
              ErrorKind::InvalidInput, "POVMs of one party must share size and outcome count");
  require(state_.dim() == alice_dim() * bob_dim(), ErrorKind::InvalidInput,
          "state size must be the product of the local dimensions");
  require(std::abs(state_.trace() - 1.0) <= 1e-10, ErrorKind::InvalidInput, "state must have trace 1");
  require(is_psd(state_, 1e-10), ErrorKind::InvalidInput, "state must be psd");
}

QuantumStrategy chsh_optimal_strategy() {
  auto measurement = [](double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    RealMatrix p(2, 2);
    p << c * c, c * s, c * s, s * s;
    const auto proj = HermitianMatrix::from_real(p);
    return Povm({proj, HermitianMatrix::identity(2) - proj});
  };
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const double pi = std::numbers::pi;
  return QuantumStrategy(HermitianMatrix::hermitian_part(phi * phi.adjoint()),
                         {measurement(0.0), measurement(pi / 4)},
                         {measurement(pi / 8), measurement(-pi / 8)});
}

CorrelationTable correlation_of_quantum_strategy(const QuantumStrategy& s) {
  const Index qa = static_cast<Index>(s.alice().size()), qb = static_cast<Index>(s.bob().size());
  const Index aa = static_cast<Index>(s.alice().front().outcomes());
  const Index ab = static_cast<Index>(s.bob().front().outcomes());
  std::vector<double> p(table_size(qa, qb, aa, ab));
  const ComplexMatrix& rho = s.state().matrix();
  for (Index a = 0; a < qa; ++a)
    for (Index b = 0; b < qb; ++b)
      for (Index x = 0; x < aa; ++x)
        for (Index y = 0; y < ab; ++y) {
          const ComplexMatrix op = kron(s.alice()[static_cast<std::size_t>(a)][static_cast<std::size_t>(x)].matrix(),
                                        s.bob()[static_cast<std::size_t>(b)][static_cast<std::size_t>(y)].matrix());
          double v = (rho * op).trace().real();
          if (v < 0.0 && v >= -1e-12) v = 0.0;
          p[static_cast<std::size_t>(((a * qb + b) * aa + x) * ab + y)] = v;
        }
  return CorrelationTable(qa, qb, aa, ab, std::move(p));
}

ClassicalMembership classical_membership(const CorrelationTable& p) {
  const Index qa = p.alice_questions(), qb = p.bob_questions(), aa = p.alice_answers(),
              ab = p.bob_answers();
  const double count = power_count(aa, qa) * power_count(ab, qb);
  require(count <= kMembershipStrategyCap, ErrorKind::SizeLimit,
          "deterministic strategy count exceeds the membership cap");
  const Index k = static_cast<Index>(count);
  const Index bob_count = static_cast<Index>(power_count(ab, qb));
  const Index entries = static_cast<Index>(p.values().size());

  std::vector<DeterministicStrategy> strategies;
  RealMatrix det(entries, k);  // column lambda is the deterministic table D_lambda
  det.setZero();
  for (Index l = 0; l < k; ++l) {
    DeterministicStrategy s{decode(l / bob_count, aa, qa), decode(l % bob_count, ab, qb)};
    for (Index a = 0; a < qa; ++a)
      for (Index b = 0; b < qb; ++b)
        det(((a * qb + b) * aa + s.alice[static_cast<std::size_t>(a)]) * ab + s.bob[static_cast<std::size_t>(b)], l) = 1.0;
    strategies.push_back(std::move(s));
  }
  const RealVector target = Eigen::Map<const RealVector>(p.values().data(), entries);

  ClassicalMembership out;
  LinearProgram mix;
  mix.cost = RealVector::Zero(k);
  mix.eq = det;
  mix.eq_rhs = target;
  const LpSolution sol = solve_lp(mix);
  if (sol.status == LpStatus::Optimal) {
    out.member = true;
    for (Index l = 0; l < k; ++l)
      if (sol.x(l) > 1e-12) out.weights.emplace_back(strategies[static_cast<std::size_t>(l)], sol.x(l));
    out.reconstruction_error = (det * sol.x - target).lpNorm<Eigen::Infinity>();
    return out;
  }

  // Separation: maximize <B,p> - beta subject to <B,D_lambda> <= beta, |B| <= 1.
  LinearProgram sep;
  sep.cost = RealVector::Zero(entries + 1);
  sep.cost.head(entries) = -target;
  sep.cost(entries) = 1.0;
  sep.ub = RealMatrix::Zero(k, entries + 1);
  sep.ub.leftCols(entries) = det.transpose();
  sep.ub.col(entries).setConstant(-1.0);
  sep.ub_rhs = RealVector::Zero(k);
  sep.lower = RealVector::Constant(entries + 1, -1.0);
  sep.lower(entries) = -std::numeric_limits<double>::infinity();
  sep.upper = RealVector::Constant(entries + 1, 1.0);
  sep.upper(entries) = std::numeric_limits<double>::infinity();
  const LpSolution cert = solve_lp(sep);
  require(cert.status == LpStatus::Optimal, ErrorKind::InternalInconsistency,
          "separation LP did not reach an optimum");
  const RealVector coeffs = cert.x.head(entries);
  out.certificate.coefficients.assign(coeffs.data(), coeffs.data() + entries);
  out.certificate.classical_max = (det.transpose() * coeffs).maxCoeff();
  out.certificate.value = coeffs.dot(target);
  require(out.certificate.margin() > 1e-9, ErrorKind::NumericalDegeneracy,
          "table lies on the boundary of the classical polytope within LP tolerance");
  return out;
}

// ---------------------------------------------------------------------------
// NPA hierarchy

namespace {

using Letter = std::pair<Index, Index>;
using Letters = std::vector<Letter>;

// Reduces a product of projections: P P = P, P_x P_x' = 0 for one question.
std::optional<Letters> reduce(const Letters& in) {
  Letters out;
  for (const auto& l : in) {
    if (!out.empty() && out.back().first == l.first) {
      if (out.back().second != l.second) return std::nullopt;
      continue;
    }
    out.push_back(l);
  }
  return out;
}

Letters reversed(const Letters& w) { return Letters(w.rbegin(), w.rend()); }

NpaWord adjoint(const NpaWord& w) { return {reversed(w.alice), reversed(w.bob)}; }

std::optional<NpaWord> product(const NpaWord& u, const NpaWord& v) {
  Letters a = reversed(u.alice), b = reversed(u.bob);
  a.insert(a.end(), v.alice.begin(), v.alice.end());
  b.insert(b.end(), v.bob.begin(), v.bob.end());
  auto ra = reduce(a), rb = reduce(b);
  if (!ra || !rb) return std::nullopt;
  return NpaWord{std::move(*ra), std::move(*rb)};
}

void party_words(Index questions, Index answers, int max_len, Letters& cur, std::vector<Letters>& out) {
  out.push_back(cur);
  if (static_cast<int>(cur.size()) == max_len) return;
  for (Index q = 0; q < questions; ++q) {
    if (!cur.empty() && cur.back().first == q) continue;
    for (Index x = 0; x + 1 < answers; ++x) {
      cur.emplace_back(q, x);
      party_words(questions, answers, max_len, cur, out);
      cur.pop_back();
      if (out.size() > kNpaWordCap) return;
    }
  }
}

void check_level(int level) {
  require(level >= 1 && level <= 3, ErrorKind::InvalidInput, "NPA level must be 1, 2 or 3");
}

ComplexMatrix unit(Index n, Index i, Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

// <A, X> = Re X_ij and <A, X> = Im X_ij as Hermitian coefficient matrices.
ComplexMatrix real_part_coeff(Index n, Index i, Index j) {
  if (i == j) return unit(n, i, i);
  return 0.5 * (unit(n, i, j) + unit(n, j, i));
}

ComplexMatrix imag_part_coeff(Index n, Index i, Index j) {
  const Complex half_i(0.0, 0.5);
  return half_i * unit(n, i, j) - half_i * unit(n, j, i);
}

}  // namespace

std::string to_string(const NpaWord& w) {
  if (w.length() == 0) return "1";
  std::string s;
  for (const auto& [q, x] : w.alice) s += "A" + std::to_string(q) + "." + std::to_string(x);
  for (const auto& [q, y] : w.bob) s += "B" + std::to_string(q) + "." + std::to_string(y);
  return s;
}

std::vector<NpaWord> npa_words(const NonlocalGame& g, int level) {
  check_level(level);
  std::vector<Letters> alice, bob;
  Letters cur;
  party_words(g.alice_questions(), g.alice_answers(), level, cur, alice);
  party_words(g.bob_questions(), g.bob_answers(), level, cur, bob);
  std::vector<NpaWord> words;
  for (const auto& a : alice)
    for (const auto& b : bob)
      if (static_cast<int>(a.size() + b.size()) <= level) {
        words.push_back({a, b});
        require(words.size() <= kNpaWordCap, ErrorKind::SizeLimit, "NPA word count exceeds the cap");
      }
  std::sort(words.begin(), words.end(), [](const NpaWord& u, const NpaWord& v) {
    if (u.length() != v.length()) return u.length() < v.length();
    if (u.alice.size() != v.alice.size()) return u.alice.size() > v.alice.size();
    return u < v;
  });
  return words;
}

SdpProblem npa_relaxation(const NonlocalGame& g, int level) {
  const auto words = npa_words(g, level);
  const Index n = static_cast<Index>(words.size());
  std::map<NpaWord, Index> index_of;
  for (Index i = 0; i < n; ++i) index_of.emplace(words[static_cast<std::size_t>(i)], i);

  SdpProblem p;
  p.block_dims = {n};
  auto add = [&](const ComplexMatrix& coeff, double rhs) {
    p.constraints.push_back({{HermitianMatrix(coeff)}, rhs});
  };
  add(unit(n, 0, 0), 1.0);

  struct Rep {
    Index i, j;
    bool conjugated;
  };
  std::map<NpaWord, Rep> reps;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      const auto w = product(words[static_cast<std::size_t>(i)], words[static_cast<std::size_t>(j)]);
      if (!w) {
        add(real_part_coeff(n, i, j), 0.0);
        if (i != j) add(imag_part_coeff(n, i, j), 0.0);
        continue;
      }
      const NpaWord adj = adjoint(*w);
      const bool conjugated = adj < *w;
      const NpaWord& key = conjugated ? adj : *w;
      auto it = reps.find(key);
      if (it == reps.end()) {
        reps.emplace(key, Rep{i, j, conjugated});
        if (adj == *w && i != j) add(imag_part_coeff(n, i, j), 0.0);
        continue;
      }
      const Rep& r = it->second;
      add(real_part_coeff(n, i, j) - real_part_coeff(n, r.i, r.j), 0.0);
      const double sign = r.conjugated == conjugated ? -1.0 : 1.0;
      const ComplexMatrix im = imag_part_coeff(n, i, j) + sign * imag_part_coeff(n, r.i, r.j);
      if (im.norm() > 0.0) add(im, 0.0);
    }

  // Projection onto answer x as a combination of surviving letters; the last
  // answer becomes 1 - sum of the others.
  auto expand = [](Index q, Index x, Index answers) {
    std::vector<std::pair<std::optional<Letter>, double>> terms;
    if (x + 1 < answers) {
      terms.emplace_back(Letter{q, x}, 1.0);
    } else {
      terms.emplace_back(std::nullopt, 1.0);
      for (Index o = 0; o + 1 < answers; ++o) terms.emplace_back(Letter{q, o}, -1.0);
    }
    return terms;
  };
  ComplexMatrix objective = ComplexMatrix::Zero(n, n);
  for (Index a = 0; a < g.alice_questions(); ++a)
    for (Index b = 0; b < g.bob_questions(); ++b)
      for (Index x = 0; x < g.alice_answers(); ++x)
        for (Index y = 0; y < g.bob_answers(); ++y) {
          if (!g.wins(a, b, x, y) || g.question_prob(a, b) == 0.0) continue;
          for (const auto& [la, ca] : expand(a, x, g.alice_answers()))
            for (const auto& [lb, cb] : expand(b, y, g.bob_answers())) {
              NpaWord u, v;
              if (la) u.alice.push_back(*la);
              if (lb) v.bob.push_back(*lb);
              const Index i = index_of.at(u), j = index_of.at(v);
              objective -= g.question_prob(a, b) * ca * cb * real_part_coeff(n, i, j);
            }
        }
  p.objective = {HermitianMatrix(objective)};
  return p;
}

NpaCertificate npa_upper_bound(const NonlocalGame& g, int level, const SdpOptions& opts) {
  NpaCertificate cert;
  cert.level = level;
  cert.words = npa_words(g, level);
  const SdpProblem p = npa_relaxation(g, level);
  const SdpSolution sol = solve(p, opts);
  cert.status = sol.status;
  cert.residuals = sol.residuals;
  if (sol.status != SdpStatus::Optimal)
    throw Error(ErrorKind::Indeterminate,
                std::string("NPA relaxation ended with status ") + to_string(sol.status));
  cert.moment_matrix = sol.blocks.front();
  cert.objective_bound = std::max(-sol.primal_objective, -sol.dual_objective);
  return cert;
}

namespace {

bool is_projective(const Povm& p) {
  for (const auto& e : p.effects())
    if ((e.matrix() * e.matrix() - e.matrix()).norm() > 1e-9) return false;
  return true;
}

struct DilatedParty {
  std::vector<std::vector<ComplexMatrix>> projections;  // [question][answer]
  ComplexMatrix embedding;                              // dilated dim x original dim
};

// Each POVM gets a unitary U with U(psi (x) e_0) = V psi for its Naimark
// isometry V; the projections U^dagger (E_xx (x) I) U then act on one shared
// space with the state embedded through e_0.
DilatedParty dilate_party(const std::vector<Povm>& povms) {
  DilatedParty out;
  const Index m = povms.front().dim();
  if (std::all_of(povms.begin(), povms.end(), is_projective)) {
    for (const auto& p : povms) {
      out.projections.emplace_back();
      for (const auto& e : p.effects()) out.projections.back().push_back(e.matrix());
    }
    out.embedding = ComplexMatrix::Identity(m, m);
    return out;
  }
  const Index n = m * static_cast<Index>(povms.front().outcomes());
  out.embedding = ComplexMatrix::Zero(n, m);
  out.embedding.topRows(m).setIdentity();
  for (const auto& p : povms) {
    const auto dil = naimark_dilate(p);
    const ComplexMatrix& v = dil.isometry;
    const auto comp = eigh(HermitianMatrix::hermitian_part(ComplexMatrix::Identity(n, n) - v * v.adjoint()));
    ComplexMatrix u(n, n);
    u.leftCols(m) = v;
    u.rightCols(n - m) = comp.eigenvectors.rightCols(n - m);
    out.projections.emplace_back();
    for (const auto& s : dil.pvm) out.projections.back().push_back(u.adjoint() * s.matrix() * u);
  }
  return out;
}

ComplexMatrix word_operator(const Letters& w, const DilatedParty& party) {
  const Index n = party.embedding.rows();
  ComplexMatrix op = ComplexMatrix::Identity(n, n);
  for (const auto& [q, x] : w) op = op * party.projections[static_cast<std::size_t>(q)][static_cast<std::size_t>(x)];
  return op;
}

}  // namespace

HermitianMatrix npa_moment_of_strategy(const NonlocalGame& g, const QuantumStrategy& s, int level) {
  require(static_cast<Index>(s.alice().size()) == g.alice_questions() &&
              static_cast<Index>(s.bob().size()) == g.bob_questions() &&
              static_cast<Index>(s.alice().front().outcomes()) == g.alice_answers() &&
              static_cast<Index>(s.bob().front().outcomes()) == g.bob_answers(),
          ErrorKind::InvalidInput, "strategy does not match the game");
  const auto words = npa_words(g, level);
  const auto alice = dilate_party(s.alice());
  const auto bob = dilate_party(s.bob());
  const ComplexMatrix embed = kron(alice.embedding, bob.embedding);
  const ComplexMatrix rho = embed * s.state().matrix() * embed.adjoint();

  const Index n = static_cast<Index>(words.size());
  std::vector<ComplexMatrix> ops;
  for (const auto& w : words) ops.push_back(kron(word_operator(w.alice, alice), word_operator(w.bob, bob)));
  ComplexMatrix gamma(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      gamma(i, j) = (rho * ops[static_cast<std::size_t>(i)].adjoint() * ops[static_cast<std::size_t>(j)]).trace();
  return HermitianMatrix::hermitian_part(gamma);
}

}  // namespace freeconvex
