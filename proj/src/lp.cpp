#include "freeconvex/lp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace freeconvex {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// How an original variable is expressed through nonnegative columns.
struct VarMap {
  enum Kind { Shifted, Reflected, Split } kind = Shifted;
  Index col = 0;  // first column
  double offset = 0.0;
};

class Tableau {
 public:
  Tableau(const RealMatrix& a, const RealVector& b, Index first_artificial)
      : m_(a.rows()), n_(a.cols()), first_art_(first_artificial) {
    t_ = RealMatrix::Zero(m_ + 1, n_ + 1);
    t_.topLeftCorner(m_, n_) = a;
    t_.topRightCorner(m_, 1) = b;
    basis_.resize(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = first_art_ + i;
  }

  // Loads an objective row as reduced costs w.r.t. the current basis.
  void set_objective(const RealVector& c) {
    t_.row(m_).setZero();
    t_.row(m_).head(n_) = c.transpose();
    for (Index i = 0; i < m_; ++i) {
      const double cb = c(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  // Returns false when unbounded.
  bool optimize(Index allowed_cols, long& pivots, long max_pivots) {
    long degenerate_run = 0;
    while (pivots < max_pivots) {
      const bool bland = degenerate_run > 50;
      Index enter = -1;
      double best = -kCostTol;
      for (Index j = 0; j < allowed_cols; ++j) {
        const double r = t_(m_, j);
        if (r < best) {
          enter = j;
          if (bland) break;
          best = r;
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      double ratio = kInf;
      for (Index i = 0; i < m_; ++i) {
        const double aij = t_(i, enter);
        if (aij > kPivotTol) {
          const double q = t_(i, n_) / aij;
          if (leave < 0 || q < ratio - 1e-12) {
            ratio = q;
            leave = i;
          } else if (q <= ratio + 1e-12 &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++pivots;
    }
    return true;
  }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Pivots artificial variables out of the basis where possible.
  void drive_out_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < first_art_) continue;
      Index best = -1;
      double mag = kPivotTol;
      for (Index j = 0; j < first_art_; ++j)
        if (std::abs(t_(i, j)) > mag) {
          mag = std::abs(t_(i, j));
          best = j;
        }
      if (best >= 0) pivot(i, best);
    }
  }

  RealVector primal() const {
    RealVector x = RealVector::Zero(n_);
    for (Index i = 0; i < m_; ++i) x(basis_[static_cast<std::size_t>(i)]) = t_(i, n_);
    return x;
  }

  double objective_row(Index j) const { return t_(m_, j); }
  double value() const { return -t_(m_, n_); }

 private:
  Index m_, n_, first_art_;
  RealMatrix t_;
  std::vector<Index> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, long max_pivots) {
  const Index nv = lp.cost.size();
  const Index meq = lp.eq.rows();
  const Index mub = lp.ub.rows();
  require(nv >= 1, ErrorKind::InvalidInput, "LP without variables");
  require(meq == 0 || (lp.eq.cols() == nv && lp.eq_rhs.size() == meq), ErrorKind::InvalidInput,
          "LP equality block has wrong shape");
  require(mub == 0 || (lp.ub.cols() == nv && lp.ub_rhs.size() == mub), ErrorKind::InvalidInput,
          "LP inequality block has wrong shape");
  const RealVector lower = lp.lower.size() ? lp.lower : RealVector::Zero(nv);
  const RealVector upper = lp.upper.size() ? lp.upper : RealVector::Constant(nv, kInf);
  require(lower.size() == nv && upper.size() == nv, ErrorKind::InvalidInput, "LP bounds have wrong length");

  // Column layout: mapped variables, then slacks, then artificials.
  std::vector<VarMap> maps(static_cast<std::size_t>(nv));
  std::vector<Index> bound_rows;  // variables with a finite range
  Index cols = 0;
  for (Index j = 0; j < nv; ++j) {
    VarMap& vm = maps[static_cast<std::size_t>(j)];
    require(lower(j) <= upper(j), ErrorKind::InvalidInput, "LP variable has empty bounds");
    if (std::isfinite(lower(j))) {
      vm = {VarMap::Shifted, cols++, lower(j)};
      if (std::isfinite(upper(j))) bound_rows.push_back(j);
    } else if (std::isfinite(upper(j))) {
      vm = {VarMap::Reflected, cols++, upper(j)};
    } else {
      vm = {VarMap::Split, cols, 0.0};
      cols += 2;
    }
  }
  const Index m = meq + mub + static_cast<Index>(bound_rows.size());
  const Index slack0 = cols;
  const Index nslack = mub + static_cast<Index>(bound_rows.size());
  const Index art0 = slack0 + nslack;
  const Index ntot = art0 + m;

  RealMatrix a = RealMatrix::Zero(m, ntot);
  RealVector b = RealVector::Zero(m);
  RealVector c = RealVector::Zero(ntot);

  auto place = [&](Index row, const Eigen::Ref<const RealVector>& coeffs, double rhs) {
    double shift = 0.0;
    for (Index j = 0; j < nv; ++j) {
      const double v = coeffs(j);
      if (v == 0.0) continue;
      const VarMap& vm = maps[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case VarMap::Shifted: a(row, vm.col) += v; shift += v * vm.offset; break;
        case VarMap::Reflected: a(row, vm.col) -= v; shift += v * vm.offset; break;
        case VarMap::Split: a(row, vm.col) += v; a(row, vm.col + 1) -= v; break;
      }
    }
    b(row) = rhs - shift;
  };
  for (Index i = 0; i < meq; ++i) place(i, lp.eq.row(i).transpose(), lp.eq_rhs(i));
  for (Index i = 0; i < mub; ++i) {
    place(meq + i, lp.ub.row(i).transpose(), lp.ub_rhs(i));
    a(meq + i, slack0 + i) = 1.0;
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    const Index row = meq + mub + static_cast<Index>(k);
    const Index j = bound_rows[k];
    a(row, maps[static_cast<std::size_t>(j)].col) = 1.0;
    a(row, slack0 + mub + static_cast<Index>(k)) = 1.0;
    b(row) = upper(j) - lower(j);
  }
  for (Index j = 0; j < nv; ++j) {
    const VarMap& vm = maps[static_cast<std::size_t>(j)];
    const double v = lp.cost(j);
    switch (vm.kind) {
      case VarMap::Shifted: c(vm.col) += v; break;
      case VarMap::Reflected: c(vm.col) -= v; break;
      case VarMap::Split: c(vm.col) += v; c(vm.col + 1) -= v; break;
    }
  }
  std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
  for (Index i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      a.row(i) *= -1.0;
      b(i) = -b(i);
      sign[static_cast<std::size_t>(i)] = -1.0;
    }
    a(i, art0 + i) = 1.0;
  }

  LpSolution sol;
  Tableau tab(a, b, art0);
  RealVector phase1 = RealVector::Zero(ntot);
  phase1.tail(m).setOnes();
  tab.set_objective(phase1);
  long pivots = 0;
  tab.optimize(art0, pivots, max_pivots);
  if (tab.value() > 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
    sol.status = LpStatus::Infeasible;
    sol.pivots = pivots;
    return sol;
  }
  tab.drive_out_artificials();
  tab.set_objective(c);
  const bool bounded = tab.optimize(art0, pivots, max_pivots);
  sol.pivots = pivots;
  if (!bounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  const RealVector s = tab.primal();
  sol.x = RealVector(nv);
  for (Index j = 0; j < nv; ++j) {
    const VarMap& vm = maps[static_cast<std::size_t>(j)];
    switch (vm.kind) {
      case VarMap::Shifted: sol.x(j) = vm.offset + s(vm.col); break;
      case VarMap::Reflected: sol.x(j) = vm.offset - s(vm.col); break;
      case VarMap::Split: sol.x(j) = s(vm.col) - s(vm.col + 1); break;
    }
  }
  sol.objective = lp.cost.dot(sol.x);
  // Artificial columns start as e_i with zero phase-two cost, so their reduced
  // costs are -y_i of the sign-normalized rows.
  sol.duals = RealVector(meq + mub);
  for (Index i = 0; i < meq + mub; ++i)
    sol.duals(i) = -tab.objective_row(art0 + i) * sign[static_cast<std::size_t>(i)];
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace freeconvex
