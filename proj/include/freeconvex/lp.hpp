#pragma once

#include "freeconvex/matcore.hpp"

namespace freeconvex {

/// minimize cost.x  s.t.  eq x = eq_rhs,  ub x <= ub_rhs,  lower <= x <= upper.
/// Empty `lower` means all zeros, empty `upper` means all +inf; entries may be
/// -inf / +inf.
struct LinearProgram {
  RealVector cost;
  RealMatrix eq;
  RealVector eq_rhs;
  RealMatrix ub;
  RealVector ub_rhs;
  RealVector lower;
  RealVector upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  RealVector x;
  double objective = 0.0;
  /// Multipliers for [eq rows..., ub rows...] with cost - A^T y >= 0 on the
  /// nonbasic directions; ub multipliers are <= 0.
  RealVector duals;
  long pivots = 0;
};

/// Dense two-phase tableau simplex (Dantzig pricing, Bland's rule after a run
/// of degenerate pivots).
LpSolution solve_lp(const LinearProgram& lp, long max_pivots = 200000);

}  // namespace freeconvex
