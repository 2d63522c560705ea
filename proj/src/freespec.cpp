#include "freeconvex/freespec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "freeconvex/random.hpp"

namespace freeconvex {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

LinearMatrixPolynomial::LinearMatrixPolynomial(HermitianMatrix constant,
                                               std::vector<HermitianMatrix> coefficients)
    : constant_(std::move(constant)), coefficients_(std::move(coefficients)) {
  require(!coefficients_.empty(), ErrorKind::InvalidInput,
          "linear matrix polynomial needs at least one variable");
  require(constant_.dim() >= 1, ErrorKind::InvalidInput, "empty coefficient matrices");
  for (const auto& c : coefficients_)
    require(c.dim() == constant_.dim(), ErrorKind::InvalidInput,
            "coefficients of a linear matrix polynomial must share one size");
}

FreeTuple::FreeTuple(std::vector<HermitianMatrix> matrices) : matrices_(std::move(matrices)) {
  require(!matrices_.empty(), ErrorKind::InvalidInput, "empty matrix tuple");
  require(matrices_.front().dim() >= 1, ErrorKind::InvalidInput, "tuple of empty matrices");
  for (const auto& m : matrices_)
    require(m.dim() == matrices_.front().dim(), ErrorKind::InvalidInput,
            "tuple matrices must share one size");
}

FreeTuple direct_sum(const FreeTuple& a, const FreeTuple& b) {
  require(a.arity() == b.arity(), ErrorKind::InvalidInput, "direct sum of tuples of different arity");
  std::vector<HermitianMatrix> out;
  const Index sa = a.level(), sb = b.level();
  for (std::size_t i = 0; i < a.arity(); ++i) {
    ComplexMatrix m = ComplexMatrix::Zero(sa + sb, sa + sb);
    m.topLeftCorner(sa, sa) = a[i].matrix();
    m.bottomRightCorner(sb, sb) = b[i].matrix();
    out.push_back(HermitianMatrix::hermitian_part(m));
  }
  return FreeTuple(std::move(out));
}

HermitianMatrix evaluate(const LinearMatrixPolynomial& l, const FreeTuple& t) {
  require(l.arity() == t.arity(), ErrorKind::InvalidInput,
          "polynomial has " + std::to_string(l.arity()) + " variables but the tuple has " +
              std::to_string(t.arity()));
  const Index s = t.level();
  ComplexMatrix acc = kron(l.constant().matrix(), ComplexMatrix::Identity(s, s));
  for (std::size_t i = 0; i < l.arity(); ++i)
    acc += kron(l.coefficients()[i].matrix(), t[i].matrix());
  return HermitianMatrix::hermitian_part(acc);
}

bool level_membership(const LinearMatrixPolynomial& l, const FreeTuple& t, double tol) {
  return is_psd(evaluate(l, t), tol);
}

LinearMatrixPolynomial free_positive_orthant(std::size_t d) {
  require(d >= 1, ErrorKind::InvalidInput, "orthant dimension must be positive");
  const Index n = static_cast<Index>(d);
  std::vector<HermitianMatrix> coeffs;
  for (Index i = 0; i < n; ++i) {
    RealVector e = RealVector::Zero(n);
    e(i) = 1.0;
    coeffs.push_back(HermitianMatrix::diagonal(e));
  }
  return LinearMatrixPolynomial(HermitianMatrix::zero(n), std::move(coeffs));
}

LinearMatrixPolynomial effects_polynomial(const std::vector<HermitianMatrix>& effects) {
  require(!effects.empty(), ErrorKind::InvalidInput, "no effects");
  const Index m = effects.front().dim();
  const HermitianMatrix id = HermitianMatrix::identity(m);
  std::vector<HermitianMatrix> coeffs;
  for (const auto& e : effects) coeffs.push_back(id - 2.0 * e);
  return LinearMatrixPolynomial(id, std::move(coeffs));
}

namespace {

template <class F>
void for_each_sign(std::size_t d, F&& f) {
  const std::uint64_t count = std::uint64_t{1} << d;
  for (std::uint64_t mask = 0; mask < count; ++mask) f(mask);
}

HermitianMatrix signed_sum(const FreeTuple& t, std::uint64_t mask) {
  ComplexMatrix acc = ComplexMatrix::Zero(t.level(), t.level());
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if ((mask >> i) & 1u)
      acc -= t[i].matrix();
    else
      acc += t[i].matrix();
  }
  return HermitianMatrix::hermitian_part(acc);
}

}  // namespace

bool matrix_diamond_membership(const FreeTuple& t, double tol) {
  require(t.arity() <= 20, ErrorKind::SizeLimit, "matrix diamond test limited to 20 variables");
  const HermitianMatrix id = HermitianMatrix::identity(t.level());
  bool member = true;
  for_each_sign(t.arity(), [&](std::uint64_t mask) {
    if (member && !is_psd(id - signed_sum(t, mask), tol)) member = false;
  });
  return member;
}

double diamond_scale(const FreeTuple& t) {
  require(t.arity() <= 20, ErrorKind::SizeLimit, "matrix diamond test limited to 20 variables");
  double worst = 0.0;
  for_each_sign(t.arity(), [&](std::uint64_t mask) {
    worst = std::max(worst, max_eigenvalue(signed_sum(t, mask)));
  });
  return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

HermitianMatrix JointPovm::marginal(std::size_t i) const {
  require(i < arity && !effects.empty(), ErrorKind::InvalidInput, "marginal index out of range");
  HermitianMatrix acc = HermitianMatrix::zero(effects.front().dim());
  for (std::size_t e = 0; e < effects.size(); ++e)
    if ((e >> i) & 1u) acc = acc + effects[e];
  return acc;
}

namespace {

void check_effects(const std::vector<HermitianMatrix>& effects, double tol) {
  require(!effects.empty(), ErrorKind::InvalidInput, "no effects given");
  require(effects.size() <= kMaxJointArity, ErrorKind::SizeLimit,
          "joint measurability limited to " + std::to_string(kMaxJointArity) + " effects");
  const Index m = effects.front().dim();
  require(m >= 1, ErrorKind::InvalidInput, "empty effect");
  const HermitianMatrix id = HermitianMatrix::identity(m);
  for (std::size_t i = 0; i < effects.size(); ++i) {
    require(effects[i].dim() == m, ErrorKind::InvalidInput, "effects must share one size");
    require(is_psd(effects[i], tol) && is_psd(id - effects[i], tol),
            ErrorKind::PreconditionViolation,
            "effect " + std::to_string(i) + " is not between 0 and I");
  }
}

// Equality constraints sum_b weight_b <B_k, X_b> + extra_k = <B_k, rhs> for
// every element B_k of the Hermitian basis.
void add_matrix_equality(SdpProblem& p, const std::vector<std::pair<std::size_t, double>>& terms,
                         const HermitianMatrix& rhs, std::size_t scalar_block = SIZE_MAX,
                         double scalar_weight = 0.0) {
  const Index m = rhs.dim();
  const HermitianMatrix id = HermitianMatrix::identity(m);
  for (const HermitianMatrix& bk : hermitian_basis(m)) {
    SdpConstraint con;
    con.coefficients.assign(p.block_dims.size(), HermitianMatrix());
    for (const auto& [block, w] : terms) con.coefficients[block] = bk * w;
    if (scalar_block != SIZE_MAX) {
      RealVector one(1);
      one(0) = scalar_weight * trace_inner(bk, id);
      con.coefficients[scalar_block] = HermitianMatrix::diagonal(one);
    }
    con.rhs = trace_inner(bk, rhs);
    p.constraints.push_back(std::move(con));
  }
}

SdpProblem joint_problem(const std::vector<HermitianMatrix>& effects, bool with_margin) {
  const std::size_t d = effects.size();
  const Index m = effects.front().dim();
  const std::size_t outcomes = std::size_t{1} << d;
  SdpProblem p;
  p.block_dims.assign(outcomes, m);
  const std::size_t margin_block = outcomes;
  if (with_margin) {
    // G_e = H_e + (mu - 1) I with H_e, mu >= 0; maximize mu.
    p.block_dims.push_back(1);
    p.objective.assign(p.block_dims.size(), HermitianMatrix());
    p.objective[margin_block] = HermitianMatrix::diagonal(RealVector::Constant(1, -1.0));
  }
  const HermitianMatrix id = HermitianMatrix::identity(m);
  std::vector<std::pair<std::size_t, double>> all;
  for (std::size_t e = 0; e < outcomes; ++e) all.emplace_back(e, 1.0);
  if (with_margin) {
    const double n = static_cast<double>(outcomes);
    add_matrix_equality(p, all, id * (1.0 + n), margin_block, n);
  } else {
    add_matrix_equality(p, all, id);
  }
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::pair<std::size_t, double>> half;
    for (std::size_t e = 0; e < outcomes; ++e)
      if ((e >> i) & 1u) half.emplace_back(e, 1.0);
    if (with_margin) {
      const double h = static_cast<double>(outcomes / 2);
      add_matrix_equality(p, half, effects[i] + id * h, margin_block, h);
    } else {
      add_matrix_equality(p, half, effects[i]);
    }
  }
  return p;
}

}  // namespace

JointMeasurability jointly_measurable(const std::vector<HermitianMatrix>& effects, double tol,
                                      const SdpOptions& opts) {
  check_effects(effects, tol);
  const SdpProblem p = joint_problem(effects, false);
  const SdpSolution sol = solve(p, opts);
  JointMeasurability out;
  out.solver_status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status == SdpStatus::Infeasible) {
    out.verdict = Verdict::No;
    out.certificate_residual = sol.certificate ? sol.certificate->residual : 0.0;
    return out;
  }
  if (sol.status != SdpStatus::Optimal) return out;

  JointPovm povm{effects.size(), sol.blocks};
  const Index m = effects.front().dim();
  HermitianMatrix total = HermitianMatrix::zero(m);
  for (const auto& g : povm.effects) total = total + g;
  double residual = (total - HermitianMatrix::identity(m)).norm();
  for (std::size_t i = 0; i < effects.size(); ++i)
    residual = std::max(residual, (povm.marginal(i) - effects[i]).norm());
  out.marginal_residual = residual;
  bool psd = true;
  for (const auto& g : povm.effects) psd = psd && is_psd(g, tol);
  if (residual <= 1e-7 && psd) {
    out.verdict = Verdict::Yes;
    out.povm = std::move(povm);
  }
  return out;
}

double compatibility_margin(const std::vector<HermitianMatrix>& effects, const SdpOptions& opts) {
  check_effects(effects, kDefaultPsdTol);
  const SdpProblem p = joint_problem(effects, true);
  const SdpSolution sol = solve(p, opts);
  require(sol.status == SdpStatus::Optimal, ErrorKind::Indeterminate,
          std::string("compatibility margin SDP ended with status ") + to_string(sol.status));
  return -sol.primal_objective - 1.0;
}

std::vector<HermitianMatrix> add_noise(const std::vector<HermitianMatrix>& effects, double eta) {
  std::vector<HermitianMatrix> out;
  for (const auto& e : effects)
    out.push_back(e * eta + HermitianMatrix::identity(e.dim()) * ((1.0 - eta) / 2.0));
  return out;
}

NoiseThreshold noise_threshold(const std::vector<HermitianMatrix>& effects, double lo, double hi,
                               double width, const SdpOptions& opts) {
  require(0.0 <= lo && lo < hi && hi <= 1.0 && width > 0.0, ErrorKind::InvalidInput,
          "noise bisection needs 0 <= lo < hi <= 1 and a positive width");
  auto compatible = [&](double eta) {
    const auto noisy = add_noise(effects, eta);
    const JointMeasurability jm = jointly_measurable(noisy, kDefaultPsdTol, opts);
    if (jm.verdict != Verdict::Indeterminate) return jm.verdict == Verdict::Yes;
    return compatibility_margin(noisy, opts) >= 0.0;
  };
  NoiseThreshold out{lo, hi, 0};
  if (compatible(hi)) {
    out.lower = out.upper = hi;
    return out;
  }
  require(compatible(lo), ErrorKind::InvalidInput, "effects are incompatible at the lower noise end");
  while (out.upper - out.lower > width) {
    const double mid = 0.5 * (out.lower + out.upper);
    (compatible(mid) ? out.lower : out.upper) = mid;
    ++out.steps;
  }
  return out;
}

namespace {

FreeTuple scaled_into_diamond(std::vector<HermitianMatrix> ms, double fraction) {
  FreeTuple t(ms);
  const double s = diamond_scale(t);
  if (!std::isfinite(s)) return t;
  for (auto& m : ms) m = m * (s * fraction);
  return FreeTuple(std::move(ms));
}

FreeTuple random_diamond_point(std::size_t d, Index level, Rng& rng) {
  std::uniform_real_distribution<double> frac(0.5, 1.0);
  std::vector<HermitianMatrix> ms;
  for (std::size_t i = 0; i < d; ++i) ms.push_back(random_hermitian(level, rng));
  return scaled_into_diamond(std::move(ms), frac(rng));
}

}  // namespace

DiamondInclusionReport diamond_inclusion_test(const std::vector<HermitianMatrix>& effects,
                                              double tol, std::uint64_t seed, std::size_t samples,
                                              const SdpOptions& opts) {
  DiamondInclusionReport report;
  report.joint = jointly_measurable(effects, tol, opts);
  report.included = report.joint.verdict == Verdict::Yes;
  const LinearMatrixPolynomial l = effects_polynomial(effects);
  const std::size_t d = effects.size();
  Rng rng(seed);

  if (report.included) {
    for (std::size_t k = 0; k < samples; ++k) {
      const Index level = k % 2 == 0 ? 1 : 2;
      const FreeTuple pt = random_diamond_point(d, level, rng);
      ++report.samples_checked;
      if (!level_membership(l, pt, tol)) {
        ++report.sample_failures;
        if (!report.violating_point) {
          report.violating_point = pt;
          report.violation = min_eigenvalue(evaluate(l, pt));
        }
      }
    }
    return report;
  }

  // Candidate aligned with the coefficients: tau_i proportional to the
  // transpose of (I - 2 sigma_i), plus random level-2 points.
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const FreeTuple& pt) {
    ++report.samples_checked;
    const double v = min_eigenvalue(evaluate(l, pt));
    if (v < best) {
      best = v;
      if (v < -tol) report.violating_point = pt;
    }
  };
  std::vector<HermitianMatrix> aligned;
  for (const auto& c : l.coefficients())
    aligned.push_back(HermitianMatrix::hermitian_part(-c.matrix().transpose()));
  consider(scaled_into_diamond(aligned, 1.0));
  for (std::size_t k = 0; k < samples; ++k) consider(random_diamond_point(d, 2, rng));
  report.violation = report.violating_point ? best : 0.0;
  return report;
}

}  // namespace freeconvex
