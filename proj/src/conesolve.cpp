#include "freeconvex/conesolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace freeconvex {

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIterations: return "maxIterations";
  }
  return "unknown";
}

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Real coordinates of a direct sum of Hermitian blocks. A block of dimension n
// occupies n^2 entries: diagonal, sqrt2*Re(upper), sqrt2*Im(upper). The map
// is an isometry for the trace inner product.
class BlockLayout {
 public:
  explicit BlockLayout(const std::vector<Index>& dims) : dims_(dims) {
    offsets_.reserve(dims.size());
    Index off = 0;
    for (Index n : dims) {
      offsets_.push_back(off);
      off += n * n;
    }
    size_ = off;
  }

  Index size() const { return size_; }
  std::size_t blocks() const { return dims_.size(); }
  Index dim(std::size_t b) const { return dims_[b]; }
  Index offset(std::size_t b) const { return offsets_[b]; }

  void pack(std::size_t b, const ComplexMatrix& m, RealVector& v) const {
    const Index n = dims_[b];
    Index k = offsets_[b];
    for (Index j = 0; j < n; ++j) v(k++) = m(j, j).real();
    for (Index j = 0; j < n; ++j)
      for (Index l = j + 1; l < n; ++l) v(k++) = kSqrt2 * m(j, l).real();
    for (Index j = 0; j < n; ++j)
      for (Index l = j + 1; l < n; ++l) v(k++) = kSqrt2 * m(j, l).imag();
  }

  ComplexMatrix unpack(std::size_t b, const RealVector& v) const {
    const Index n = dims_[b];
    ComplexMatrix m(n, n);
    Index k = offsets_[b];
    for (Index j = 0; j < n; ++j) m(j, j) = v(k++);
    for (Index j = 0; j < n; ++j)
      for (Index l = j + 1; l < n; ++l) m(j, l) = v(k++) / kSqrt2;
    for (Index j = 0; j < n; ++j)
      for (Index l = j + 1; l < n; ++l) {
        m(j, l) += Complex(0.0, v(k++) / kSqrt2);
        m(l, j) = std::conj(m(j, l));
      }
    return m;
  }

  // Euclidean projection onto the product of psd cones, in place. Optionally
  // returns the norm of the removed (negative) part.
  void project_cone(RealVector& v) const {
    for (std::size_t b = 0; b < dims_.size(); ++b) {
      const Index n = dims_[b];
      if (n == 1) {
        v(offsets_[b]) = std::max(v(offsets_[b]), 0.0);
        continue;
      }
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(unpack(b, v));
      RealVector lam = es.eigenvalues().cwiseMax(0.0);
      const ComplexMatrix& u = es.eigenvectors();
      pack(b, u * lam.cast<Complex>().asDiagonal() * u.adjoint(), v);
    }
  }

  double positive_part_norm(const RealVector& v) const {
    RealVector p = v;
    project_cone(p);
    return p.norm();
  }

  double negative_part_norm(const RealVector& v) const {
    RealVector p = v;
    project_cone(p);
    return (v - p).norm();
  }

 private:
  std::vector<Index> dims_;
  std::vector<Index> offsets_;
  Index size_ = 0;
};

struct Assembled {
  RealMatrix a;
  RealVector b;
  RealVector c;
};

Assembled assemble(const SdpProblem& p, const BlockLayout& layout) {
  Assembled out;
  const Index m = static_cast<Index>(p.constraints.size());
  out.a = RealMatrix::Zero(m, layout.size());
  out.b = RealVector(m);
  out.c = RealVector::Zero(layout.size());
  RealVector row = RealVector::Zero(layout.size());
  for (std::size_t b = 0; b < layout.blocks(); ++b)
    if (b < p.objective.size() && p.objective[b].dim() > 0)
      layout.pack(b, p.objective[b].matrix(), out.c);
  for (Index i = 0; i < m; ++i) {
    const SdpConstraint& con = p.constraints[static_cast<std::size_t>(i)];
    row.setZero();
    for (std::size_t b = 0; b < con.coefficients.size(); ++b)
      if (con.coefficients[b].dim() > 0) layout.pack(b, con.coefficients[b].matrix(), row);
    out.a.row(i) = row.transpose();
    out.b(i) = con.rhs;
  }
  return out;
}

// Cached pseudo-inverse of A A^T.
struct GramInverse {
  RealMatrix eigvecs;
  RealVector inv_eigvals;  // zero on the numerical kernel

  explicit GramInverse(const RealMatrix& a) {
    const Index m = a.rows();
    if (m == 0) return;
    RealMatrix g = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
    eigvecs = es.eigenvectors();
    const RealVector& lam = es.eigenvalues();
    const double cut = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    inv_eigvals = lam.unaryExpr([cut](double x) { return x > cut ? 1.0 / x : 0.0; });
  }

  RealVector apply(const RealVector& v) const {
    if (v.size() == 0) return v;
    return eigvecs * (inv_eigvals.asDiagonal() * (eigvecs.transpose() * v));
  }

  // Component of v outside range(A A^T).
  RealVector kernel_part(const RealVector& v) const {
    if (v.size() == 0) return v;
    RealVector coeff = eigvecs.transpose() * v;
    for (Index i = 0; i < coeff.size(); ++i)
      if (inv_eigvals(i) != 0.0) coeff(i) = 0.0;
    return eigvecs * coeff;
  }
};

std::vector<HermitianMatrix> unpack_all(const BlockLayout& layout, const RealVector& v) {
  std::vector<HermitianMatrix> out;
  out.reserve(layout.blocks());
  for (std::size_t b = 0; b < layout.blocks(); ++b)
    out.push_back(HermitianMatrix::hermitian_part(layout.unpack(b, v)));
  return out;
}

SdpResiduals residuals_of(const Assembled& d, const BlockLayout& layout, const RealVector& x,
                          const RealVector& y) {
  SdpResiduals r;
  const double cx = d.c.dot(x);
  const double by = d.b.size() ? d.b.dot(y) : 0.0;
  r.primal_feas = d.b.size() ? (d.a * x - d.b).norm() / (1.0 + d.b.norm()) : 0.0;
  RealVector slack = d.c;
  if (d.b.size()) slack -= d.a.transpose() * y;
  r.dual_feas = layout.negative_part_norm(slack) / (1.0 + d.c.norm());
  r.gap = std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by));
  return r;
}

double ray_residual(const Assembled& d, const BlockLayout& layout, const RealVector& y) {
  const double by = d.b.dot(y);
  if (!(by > 0.0)) return std::numeric_limits<double>::infinity();
  const RealVector yn = y / by;
  const RealVector aty = d.a.transpose() * yn;
  return layout.positive_part_norm(aty) / std::max(1.0, aty.norm());
}

}  // namespace

void validate(const SdpProblem& p) {
  require(!p.block_dims.empty(), ErrorKind::InvalidInput, "SDP has no blocks");
  for (Index n : p.block_dims)
    require(n >= 1, ErrorKind::InvalidInput, "SDP block dimensions must be positive");
  require(p.objective.size() <= p.block_dims.size(), ErrorKind::InvalidInput,
          "more objective blocks than psd blocks");
  for (std::size_t b = 0; b < p.objective.size(); ++b)
    require(p.objective[b].dim() == 0 || p.objective[b].dim() == p.block_dims[b],
            ErrorKind::InvalidInput, "objective block " + std::to_string(b) + " has wrong size");
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const SdpConstraint& con = p.constraints[i];
    require(std::isfinite(con.rhs), ErrorKind::InvalidInput,
            "constraint " + std::to_string(i) + " has a non-finite right-hand side");
    require(con.coefficients.size() <= p.block_dims.size(), ErrorKind::InvalidInput,
            "constraint " + std::to_string(i) + " has too many blocks");
    for (std::size_t b = 0; b < con.coefficients.size(); ++b)
      require(con.coefficients[b].dim() == 0 || con.coefficients[b].dim() == p.block_dims[b],
              ErrorKind::InvalidInput,
              "constraint " + std::to_string(i) + " block " + std::to_string(b) + " has wrong size");
  }
}

SdpResiduals certify(const SdpProblem& p, const std::vector<HermitianMatrix>& blocks,
                     const RealVector& y) {
  validate(p);
  const BlockLayout layout(p.block_dims);
  const Assembled d = assemble(p, layout);
  require(blocks.size() == p.block_dims.size() && y.size() == d.b.size(),
          ErrorKind::InvalidInput, "solution shape does not match the problem");
  RealVector x(layout.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    require(blocks[b].dim() == p.block_dims[b], ErrorKind::InvalidInput, "solution block size");
    layout.pack(b, blocks[b].matrix(), x);
  }
  return residuals_of(d, layout, x, y);
}

double certificate_residual(const SdpProblem& p, const RealVector& ray) {
  validate(p);
  const BlockLayout layout(p.block_dims);
  const Assembled d = assemble(p, layout);
  require(ray.size() == d.b.size(), ErrorKind::InvalidInput, "certificate length mismatch");
  return ray_residual(d, layout, ray);
}

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts) {
  validate(p);
  const BlockLayout layout(p.block_dims);
  const Assembled d = assemble(p, layout);
  const GramInverse ginv(d.a);
  const Index n = layout.size();

  SdpSolution sol;
  auto finish = [&](const RealVector& x, const RealVector& y) {
    sol.blocks = unpack_all(layout, x);
    sol.dual_multipliers = y;
    sol.primal_objective = d.c.dot(x);
    sol.dual_objective = d.b.size() ? d.b.dot(y) : 0.0;
    sol.residuals = residuals_of(d, layout, x, y);
  };

  // Inconsistent equalities: the part of b outside range(A) is a Farkas ray
  // with A^T y = 0.
  if (d.b.size()) {
    RealVector kb = ginv.kernel_part(d.b);
    if (kb.norm() > 1e-9 * (1.0 + d.b.norm())) {
      sol.status = SdpStatus::Infeasible;
      sol.certificate = InfeasibilityCertificate{kb / d.b.dot(kb), ray_residual(d, layout, kb)};
      finish(RealVector::Zero(n), RealVector::Zero(d.b.size()));
      return sol;
    }
  }

  auto project_affine = [&](const RealVector& v) -> RealVector {
    if (d.b.size() == 0) return v;
    return v - d.a.transpose() * ginv.apply(d.a * v - d.b);
  };
  auto dual_from_slack = [&](const RealVector& s) -> RealVector {
    if (d.b.size() == 0) return RealVector();
    return ginv.apply(d.a * (d.c - s));
  };

  double rho = opts.rho;
  const double alpha = opts.relaxation;
  RealVector z = RealVector::Zero(n);
  RealVector u = RealVector::Zero(n);
  RealVector z_prev = z;
  RealVector u_check = u;
  long last_check = 0;
  RealVector best_x = z, best_y = RealVector::Zero(d.b.size());
  double best_score = std::numeric_limits<double>::infinity();

  for (long it = 1; it <= opts.max_iterations; ++it) {
    const RealVector x = project_affine(z - u - d.c / rho);
    const RealVector xr = alpha * x + (1.0 - alpha) * z;
    z_prev = z;
    z = xr + u;
    layout.project_cone(z);
    u += xr - z;

    if (it % opts.check_every != 0 && it != opts.max_iterations) continue;

    // u stays in -K (Moreau), so s = -rho u is an exactly psd dual slack.
    const RealVector s = -rho * u;
    const RealVector y = dual_from_slack(s);
    const SdpResiduals r = residuals_of(d, layout, z, y);
    sol.iterations = it;
    const double score = std::max({r.primal_feas / opts.tol, r.dual_feas / opts.tol,
                                   r.gap / opts.gap_tol});
    if (score < best_score) {
      best_score = score;
      best_x = z;
      best_y = y;
    }
    if (r.primal_feas <= opts.tol && r.dual_feas <= opts.tol && r.gap <= opts.gap_tol) {
      sol.status = SdpStatus::Optimal;
      finish(z, y);
      return sol;
    }

    // Divergence of u points along the Farkas direction A^T y <= 0, b.y > 0.
    const long span = it - last_check;
    if (d.b.size() && span > 0 && r.primal_feas > opts.tol) {
      const RealVector du = (u - u_check) / static_cast<double>(span);
      if (du.norm() > 1e-12) {
        RealVector ray = ginv.apply(d.a * du);
        const double res = ray_residual(d, layout, ray);
        if (res <= opts.infeasibility_tol) {
          sol.status = SdpStatus::Infeasible;
          sol.certificate = InfeasibilityCertificate{ray / d.b.dot(ray), res};
          finish(z, y);
          return sol;
        }
      }
    }

    // Residual balancing on the ADMM residuals; rescales u to keep rho*u fixed.
    const double prim = (x - z).norm();
    const double dual = rho * (z - z_prev).norm();
    if (prim > 10.0 * dual && rho < 1e6) {
      rho *= 2.0;
      u /= 2.0;
    } else if (dual > 10.0 * prim && rho > 1e-6) {
      rho /= 2.0;
      u *= 2.0;
    }
    u_check = u;
    last_check = it;
  }

  sol.status = SdpStatus::MaxIterations;
  finish(best_x, best_y);
  return sol;
}

PsdProjection project_psd(const HermitianMatrix& h) {
  const EigenDecomposition ed = eigh(h);
  const RealVector& lam = ed.eigenvalues;
  RealVector pos = lam.cwiseMax(0.0);
  double neg = 0.0;
  for (Index i = 0; i < lam.size(); ++i) neg += std::max(-lam(i), 0.0);
  const ComplexMatrix& u = ed.eigenvectors;
  return {HermitianMatrix::hermitian_part(u * pos.cast<Complex>().asDiagonal() * u.adjoint()), neg};
}

}  // namespace freeconvex
