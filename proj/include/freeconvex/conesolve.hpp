#pragma once

#include <optional>
#include <vector>

#include "freeconvex/matcore.hpp"

namespace freeconvex {

/// One linear equality sum_b <A_b, X_b> = rhs. A coefficient block of
/// dimension 0 stands for the zero matrix.
struct SdpConstraint {
  std::vector<HermitianMatrix> coefficients;
  double rhs = 0.0;
};

/// minimize sum_b <C_b, X_b>  s.t.  constraints, X_b psd (complex Hermitian).
struct SdpProblem {
  std::vector<Index> block_dims;
  std::vector<HermitianMatrix> objective;  // empty blocks are zero
  std::vector<SdpConstraint> constraints;
};

enum class SdpStatus { Optimal, Infeasible, MaxIterations };
const char* to_string(SdpStatus status);

struct SdpResiduals {
  double primal_feas = 0.0;  // ||A x - b|| / (1 + ||b||)
  double dual_feas = 0.0;    // ||(c - A^T y)_-|| / (1 + ||c||)
  double gap = 0.0;          // |c.x - b.y| / (1 + |c.x| + |b.y|)
};

/// Farkas ray y with b.y = 1 and A^T y (as block matrices) approximately nsd.
struct InfeasibilityCertificate {
  RealVector ray;
  double residual = 0.0;  // ||(A^T y)_+|| / max(1, ||A^T y||)
};

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIterations;
  std::vector<HermitianMatrix> blocks;
  RealVector dual_multipliers;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  SdpResiduals residuals;
  long iterations = 0;
  std::optional<InfeasibilityCertificate> certificate;
};

struct SdpOptions {
  double tol = 1e-7;
  double gap_tol = 1e-6;
  long max_iterations = 200000;
  double relaxation = 1.6;
  double rho = 1.0;
  int check_every = 25;
  double infeasibility_tol = 1e-6;
};

void validate(const SdpProblem& p);

/// ADMM splitting: projection onto the affine constraint set through a cached
/// pseudo-inverse of A A^T, projection onto the psd cone through eigh.
SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {});

/// Recomputes residuals of (blocks, y) from the problem data alone.
SdpResiduals certify(const SdpProblem& p, const std::vector<HermitianMatrix>& blocks,
                     const RealVector& y);

/// Residual of a Farkas ray, recomputed from the problem data (same measure as
/// InfeasibilityCertificate::residual); +inf when b.y <= 0.
double certificate_residual(const SdpProblem& p, const RealVector& ray);

struct PsdProjection {
  HermitianMatrix projected;
  double negative_trace = 0.0;  // sum of max(-lambda_i, 0)
};

PsdProjection project_psd(const HermitianMatrix& h);

}  // namespace freeconvex
