#pragma once

#include <vector>

#include "freeconvex/matcore.hpp"

namespace freeconvex {

/// d x d array of s x s Hermitian entries, stored row-major. The constructor
/// checks shape only; the POVM structure is checked by validate_magic_square.
class QuantumMagicSquare {
 public:
  QuantumMagicSquare(Index d, std::vector<HermitianMatrix> entries);
  /// Level-1 square from a real matrix.
  static QuantumMagicSquare from_real(const RealMatrix& m);

  Index size() const { return d_; }
  Index level() const { return entries_.front().dim(); }
  const HermitianMatrix& operator()(Index i, Index j) const {
    return entries_[static_cast<std::size_t>(i * d_ + j)];
  }
  const std::vector<HermitianMatrix>& entries() const { return entries_; }

 private:
  Index d_;
  std::vector<HermitianMatrix> entries_;
};

struct MagicViolation {
  enum class Kind { NotPsd, RowSum, ColumnSum } kind;
  Index row = -1;     // -1 when not applicable
  Index column = -1;
  double residual = 0.0;  // -lambda_min for NotPsd, Frobenius distance to I otherwise
};
const char* to_string(MagicViolation::Kind k);

struct MagicValidation {
  bool valid = true;
  std::vector<MagicViolation> violations;
};

/// Entries psd to `tol`, row and column sums equal to I within `sum_tol`.
MagicValidation validate_magic_square(const QuantumMagicSquare& m, double tol = kDefaultPsdTol,
                                      double sum_tol = 1e-8);

/// Valid square whose entries are all projections (||P^2 - P||_F <= tol).
bool is_quantum_permutation(const QuantumMagicSquare& m, double tol = 1e-9);

struct BirkhoffTerm {
  double weight = 0.0;
  std::vector<Index> permutation;  // row i has its 1 in column permutation[i]
};

RealMatrix permutation_matrix(const std::vector<Index>& permutation);

/// Convex combination of permutation matrices equal to the doubly stochastic
/// `m`, with at most (d-1)^2 + 1 terms.
std::vector<BirkhoffTerm> birkhoff_decompose(const RealMatrix& m, double tol = 1e-9);

/// Family of psd effects summing to I_m (checked at construction).
class Povm {
 public:
  explicit Povm(std::vector<HermitianMatrix> effects, double tol = kDefaultPsdTol,
                double sum_tol = 1e-8);

  Index dim() const { return effects_.front().dim(); }
  std::size_t outcomes() const { return effects_.size(); }
  const std::vector<HermitianMatrix>& effects() const { return effects_; }
  const HermitianMatrix& operator[](std::size_t i) const { return effects_[i]; }

 private:
  std::vector<HermitianMatrix> effects_;
};

struct NaimarkDilation {
  std::vector<HermitianMatrix> pvm;  // n x n projections, n = m * k
  ComplexMatrix isometry;            // n x m
};

/// sigma_i = E_ii (x) I_m and v = [tau_1^(1/2); ...; tau_k^(1/2)].
NaimarkDilation naimark_dilate(const Povm& p);

struct NaimarkResiduals {
  double projection = 0.0;    // max ||sigma_i^2 - sigma_i||
  double orthogonality = 0.0; // max ||sigma_i sigma_j|| (i != j)
  double completeness = 0.0;  // ||sum sigma_i - I||
  double isometry = 0.0;      // ||v^dagger v - I||
  double marginal = 0.0;      // max ||v^dagger sigma_i v - tau_i||

  double max() const;
};

NaimarkResiduals naimark_residuals(const NaimarkDilation& dil, const Povm& p);

}  // namespace freeconvex
