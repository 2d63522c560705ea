#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "freeconvex/matcore.hpp"

namespace freeconvex {

/// C_T = sum_ij E_ij (x) T(E_ij) for T: Mat_d -> Mat_s.
class ChoiMatrix {
 public:
  ChoiMatrix(HermitianMatrix c, Index input_dim, Index output_dim);

  const HermitianMatrix& matrix() const { return c_; }
  Index input_dim() const { return d_; }
  Index output_dim() const { return s_; }

 private:
  HermitianMatrix c_;
  Index d_, s_;
};

/// `images[i * d + j]` is T(E_ij), each s x s. Throws InvalidMap when the map
/// does not preserve Hermiticity.
ChoiMatrix choi_of_map(const std::vector<ComplexMatrix>& images, Index d, Index s);
/// Choi matrix of X -> sum_a K_a X K_a^dagger.
ChoiMatrix choi_of_kraus(const std::vector<ComplexMatrix>& kraus);

bool is_completely_positive(const ChoiMatrix& c, double tol = kDefaultPsdTol);

struct BlockPositivityResult {
  bool violation_found = false;
  ComplexVector x;  // witness sigma = x x^dagger on the input side
  ComplexVector y;  // witness tau = y y^dagger on the output side
  double value = 0.0;  // smallest <x (x) y, C x (x) y> seen
  std::size_t seeds_run = 0;
};

/// Multi-start alternating minimization of (x (x) y)^dagger C (x (x) y) over
/// unit x, y. A found violation is a proof that C is not block positive; no
/// violation found proves nothing.
BlockPositivityResult block_positivity_search(const ChoiMatrix& c, int iterations = 100,
                                              int seeds = 50, std::uint64_t seed = 0,
                                              double tol = kDefaultPsdTol);

/// Smallest value of tr((x x^dagger (x) y y^dagger) C) over `probes` random
/// product vectors.
double product_probe_min(const ChoiMatrix& c, std::size_t probes, std::uint64_t seed = 0);

/// rho = sum_i left[i] (x) right[i] with Hermitian factors; singular values
/// are split evenly (sqrt) into the two sides.
struct SchmidtDecomposition {
  Index rank = 0;
  std::vector<HermitianMatrix> left;
  std::vector<HermitianMatrix> right;
  RealVector singular_values;  // descending, length rank
};

/// Operator Schmidt decomposition across d|s, computed as the real SVD of the
/// coefficient matrix in orthonormal Hermitian bases.
SchmidtDecomposition operator_schmidt(const HermitianMatrix& rho, Index d, Index s,
                                      double tol = 1e-9);

enum class ConeKind { Simplex, Ray, Nonsalient, Full, Zero };
const char* to_string(ConeKind k);

/// {(a, b) : a sigma_1 + b sigma_2 psd}. Full: the whole plane (zero pair);
/// Zero: only the origin.
struct ConeRays2D {
  ConeKind kind = ConeKind::Zero;
  std::vector<std::array<double, 2>> rays;  // unit vectors; simplex rays ordered counterclockwise
};

ConeRays2D cone_rays_2d(const HermitianMatrix& sigma1, const HermitianMatrix& sigma2);

using ProductTerm = std::pair<HermitianMatrix, HermitianMatrix>;

/// Separable decomposition of rho = sigma1 (x) tau1 + sigma2 (x) tau2 (psd)
/// into at most two products of psd matrices. Left factors are normalized to
/// unit trace.
std::vector<ProductTerm> separable_rank2(const HermitianMatrix& sigma1, const HermitianMatrix& tau1,
                                         const HermitianMatrix& sigma2, const HermitianMatrix& tau2,
                                         double tol = kDefaultPsdTol);

enum class SeparabilityVerdict { Separable, Entangled, Inconclusive };
const char* to_string(SeparabilityVerdict v);

/// Partial transpose test, conclusive for d*s <= 6.
SeparabilityVerdict separability_oracle_small(const HermitianMatrix& rho, Index d, Index s,
                                              double tol = kDefaultPsdTol);

}  // namespace freeconvex
