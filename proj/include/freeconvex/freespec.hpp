#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "freeconvex/conesolve.hpp"
#include "freeconvex/matcore.hpp"

namespace freeconvex {

/// l(z) = sigma_0 (x) 1 + sum_i sigma_i (x) z_i with Hermitian m x m coefficients.
class LinearMatrixPolynomial {
 public:
  LinearMatrixPolynomial(HermitianMatrix constant, std::vector<HermitianMatrix> coefficients);

  Index size() const { return constant_.dim(); }
  std::size_t arity() const { return coefficients_.size(); }
  const HermitianMatrix& constant() const { return constant_; }
  const std::vector<HermitianMatrix>& coefficients() const { return coefficients_; }

 private:
  HermitianMatrix constant_;
  std::vector<HermitianMatrix> coefficients_;
};

/// A point (tau_1, ..., tau_d) of Her_s^d.
class FreeTuple {
 public:
  explicit FreeTuple(std::vector<HermitianMatrix> matrices);

  Index level() const { return matrices_.front().dim(); }
  std::size_t arity() const { return matrices_.size(); }
  const std::vector<HermitianMatrix>& matrices() const { return matrices_; }
  const HermitianMatrix& operator[](std::size_t i) const { return matrices_[i]; }

 private:
  std::vector<HermitianMatrix> matrices_;
};

FreeTuple direct_sum(const FreeTuple& a, const FreeTuple& b);

/// sigma_0 (x) I_s + sum_i sigma_i (x) tau_i.
HermitianMatrix evaluate(const LinearMatrixPolynomial& l, const FreeTuple& t);

bool level_membership(const LinearMatrixPolynomial& l, const FreeTuple& t,
                      double tol = kDefaultPsdTol);

/// p = sum_i E_ii (x) z_i; its free spectrahedron is {tau : every tau_i psd}.
LinearMatrixPolynomial free_positive_orthant(std::size_t d);

/// I_m (x) 1 - sum_i (2 sigma_i - I_m) (x) z_i.
LinearMatrixPolynomial effects_polynomial(const std::vector<HermitianMatrix>& effects);

/// I_s - sum_i (+-) tau_i psd for every sign pattern.
bool matrix_diamond_membership(const FreeTuple& t, double tol = kDefaultPsdTol);

/// Largest t >= 0 with t * tau in the matrix diamond (+inf for the zero tuple).
double diamond_scale(const FreeTuple& t);

/// Joint POVM; effect index e is a bit mask with bit i = outcome of effect i.
struct JointPovm {
  std::size_t arity = 0;
  std::vector<HermitianMatrix> effects;

  /// sum over e with bit i set.
  HermitianMatrix marginal(std::size_t i) const;
};

enum class Verdict { Yes, No, Indeterminate };
const char* to_string(Verdict v);

struct JointMeasurability {
  Verdict verdict = Verdict::Indeterminate;
  std::optional<JointPovm> povm;        // Yes
  double marginal_residual = 0.0;       // max Frobenius residual over marginals and sum
  SdpStatus solver_status = SdpStatus::MaxIterations;
  double certificate_residual = 0.0;    // No: Farkas ray residual
  long iterations = 0;
};

inline constexpr std::size_t kMaxJointArity = 10;

/// Feasibility SDP {G_e psd, sum_e G_e = I, sum_{e_i = 1} G_e = sigma_i}.
JointMeasurability jointly_measurable(const std::vector<HermitianMatrix>& effects,
                                      double tol = kDefaultPsdTol, const SdpOptions& opts = {});

/// max lambda s.t. G_e >= lambda I with the same marginal constraints,
/// floored at -1. Nonnegative iff the effects are jointly measurable.
double compatibility_margin(const std::vector<HermitianMatrix>& effects, const SdpOptions& opts = {});

/// sigma_i(eta) = eta * sigma_i + (1 - eta) * I / 2.
std::vector<HermitianMatrix> add_noise(const std::vector<HermitianMatrix>& effects, double eta);

struct NoiseThreshold {
  double lower = 0.0;  // largest eta found jointly measurable
  double upper = 1.0;  // smallest eta found not jointly measurable
  int steps = 0;
};

/// Bisection over eta in [lo, hi] on the feasibility SDP (indeterminate solves
/// are settled by the sign of compatibility_margin).
NoiseThreshold noise_threshold(const std::vector<HermitianMatrix>& effects, double lo = 0.0,
                               double hi = 1.0, double width = 1e-3, const SdpOptions& opts = {});

struct DiamondInclusionReport {
  bool included = false;
  JointMeasurability joint;
  std::size_t samples_checked = 0;
  std::size_t sample_failures = 0;       // sampled points outside C(l) despite Yes
  std::optional<FreeTuple> violating_point;
  double violation = 0.0;                // lambda_min of l at violating_point
};

/// D subset C(l) for l = effects_polynomial(effects), decided through the joint
/// measurability SDP. On Yes, samples level-1 and level-2 diamond points and
/// checks them against C(l); on No, searches diamond points for a violation.
DiamondInclusionReport diamond_inclusion_test(const std::vector<HermitianMatrix>& effects,
                                              double tol = kDefaultPsdTol, std::uint64_t seed = 0,
                                              std::size_t samples = 200,
                                              const SdpOptions& opts = {});

}  // namespace freeconvex
