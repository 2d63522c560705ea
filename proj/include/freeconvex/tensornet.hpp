#pragma once

#include <optional>
#include <vector>

#include "freeconvex/matcore.hpp"

namespace freeconvex {

/// Matrix product density operator on a ring of sites:
///   rho = sum over bond cycles of rho1[i1,i2] (x) rho2[i2,i3] (x) ... (x) rhoN[iN,i1].
class Mpdo {
 public:
  /// tensors[site][i * r + i'] is a d_site x d_site block.
  Mpdo(Index bond_dim, std::vector<std::vector<ComplexMatrix>> tensors);

  Index sites() const { return static_cast<Index>(tensors_.size()); }
  Index bond_dim() const { return r_; }
  Index phys_dim(Index site) const { return tensors_[static_cast<std::size_t>(site)].front().rows(); }
  std::vector<Index> phys_dims() const;
  const ComplexMatrix& block(Index site, Index i, Index j) const {
    return tensors_[static_cast<std::size_t>(site)][static_cast<std::size_t>(i * r_ + j)];
  }

 private:
  Index r_;
  std::vector<std::vector<ComplexMatrix>> tensors_;
};

/// Translation-invariant tensor: one r x r array of d x d blocks.
class TiTensor {
 public:
  TiTensor(Index bond_dim, std::vector<ComplexMatrix> blocks);

  Index bond_dim() const { return r_; }
  Index phys_dim() const { return blocks_.front().rows(); }
  const ComplexMatrix& block(Index a, Index b) const { return blocks_[static_cast<std::size_t>(a * r_ + b)]; }
  /// The n-site ring built from copies of this tensor.
  Mpdo ring(Index n) const;

 private:
  Index r_;
  std::vector<ComplexMatrix> blocks_;
};

struct DenseMpdo {
  ComplexMatrix matrix;
  bool hermitian = false;
  double asymmetry = 0.0;  // ||M - M^dagger||_F / max(1, ||M||_F)
};

DenseMpdo mpdo_to_dense(const Mpdo& m, Index cap = kDefaultDimCap);

/// tr(rho^k) from per-site transfer matrices of size r^k.
Complex mpdo_moment(const Mpdo& m, int k, Index cap = kDefaultDimCap);

/// tau_n as a Hermitian matrix; Error(InvalidInput) when it is not Hermitian.
HermitianMatrix tau_n(const TiTensor& t, Index n, Index cap = kDefaultDimCap);

enum class ScanVerdict { Psd, NotPsd, Inconclusive };
const char* to_string(ScanVerdict v);

struct TauScanEntry {
  Index n = 0;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  bool dense = false;              // exact eigenvalue check when true, moment bounds otherwise
  double min_eigenvalue = 0.0;     // dense only
  double negative_lower = 0.0;     // moment bounds on tr(tau_n)_- (moment mode)
  double negative_upper = 0.0;
  int moment_degree = 0;
};

/// Verdicts for n = 1..n_max only; nothing is claimed beyond n_max.
std::vector<TauScanEntry> tau_psd_scan(const TiTensor& t, Index n_max, double tol = 1e-9,
                                       Index cap = kDefaultDimCap);

/// Moments m_1..m_K of a Hermitian operator of size `dim`, plus an interval
/// known to contain its spectrum.
struct MomentVector {
  double dim = 0.0;
  RealVector moments;  // moments(k-1) = tr(rho^k)
  double lower = 0.0;
  double upper = 0.0;

  int count() const { return static_cast<int>(moments.size()); }
};

/// Default interval [-B, B] with B = sqrt(m_2) >= spectral radius.
MomentVector make_moment_vector(double dim, RealVector moments,
                                std::optional<std::pair<double, double>> interval = std::nullopt);

MomentVector mpdo_moment_vector(const Mpdo& m, int count, Index cap = kDefaultDimCap);

enum class BoundSide { Upper, Lower };

/// Polynomial q of degree K in the Chebyshev basis on [lower, upper] with
/// q >= max(-x, 0) (Upper) or q <= max(-x, 0) (Lower) on the grid.
struct PolyBound {
  int degree = 0;
  double lower = 0.0, upper = 0.0;
  BoundSide side = BoundSide::Upper;
  RealVector chebyshev;       // coefficients of T_j((2x - lower - upper) / (upper - lower))
  double grid_error = 0.0;    // dominance violation found on the fine grid, already shifted out
  double integral_gap = 0.0;  // integral of |q - g| over the interval

  double operator()(double x) const;
};

inline constexpr int kMaxPolyDegree = 40;

PolyBound poly_bound(double lower, double upper, int degree, BoundSide side);


struct DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on tr(rho_-) from moments only.
DistanceBounds psd_distance_bounds(const MomentVector& mv, int degree);

struct PurificationBounds {
  Index lower = 0;
  Index upper = 0;
  HermitianMatrix purification;  // rho^(1/2)
};

PurificationBounds purification_bounds(const HermitianMatrix& rho, Index d, Index s,
                                       double tol = kDefaultPsdTol);

}  // namespace freeconvex
