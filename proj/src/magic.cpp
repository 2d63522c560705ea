#include "freeconvex/magic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <limits>
#include <optional>
#include <string>

namespace freeconvex {

const char* to_string(MagicViolation::Kind k) {
  switch (k) {
    case MagicViolation::Kind::NotPsd: return "notPsd";
    case MagicViolation::Kind::RowSum: return "rowSum";
    case MagicViolation::Kind::ColumnSum: return "columnSum";
  }
  return "unknown";
}

QuantumMagicSquare::QuantumMagicSquare(Index d, std::vector<HermitianMatrix> entries)
    : d_(d), entries_(std::move(entries)) {
  require(d_ >= 1 && entries_.size() == static_cast<std::size_t>(d_ * d_), ErrorKind::InvalidInput,
          "magic square needs d*d entries");
  const Index s = entries_.front().dim();
  require(s >= 1, ErrorKind::InvalidInput, "magic square entries are empty");
  for (const auto& e : entries_)
    require(e.dim() == s, ErrorKind::InvalidInput, "magic square entries must share one size");
}

QuantumMagicSquare QuantumMagicSquare::from_real(const RealMatrix& m) {
  require(m.rows() == m.cols(), ErrorKind::InvalidInput, "magic square must be square");
  std::vector<HermitianMatrix> entries;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      entries.push_back(HermitianMatrix::diagonal(RealVector::Constant(1, m(i, j))));
  return QuantumMagicSquare(m.rows(), std::move(entries));
}

MagicValidation validate_magic_square(const QuantumMagicSquare& m, double tol, double sum_tol) {
  MagicValidation out;
  const Index d = m.size(), s = m.level();
  const ComplexMatrix id = ComplexMatrix::Identity(s, s);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (!is_psd(m(i, j), tol))
        out.violations.push_back({MagicViolation::Kind::NotPsd, i, j, -min_eigenvalue(m(i, j))});
  for (Index i = 0; i < d; ++i) {
    ComplexMatrix row = -id, col = -id;
    for (Index j = 0; j < d; ++j) {
      row += m(i, j).matrix();
      col += m(j, i).matrix();
    }
    if (row.norm() > sum_tol) out.violations.push_back({MagicViolation::Kind::RowSum, i, -1, row.norm()});
    if (col.norm() > sum_tol)
      out.violations.push_back({MagicViolation::Kind::ColumnSum, -1, i, col.norm()});
  }
  out.valid = out.violations.empty();
  return out;
}

bool is_quantum_permutation(const QuantumMagicSquare& m, double tol) {
  if (!validate_magic_square(m).valid) return false;
  for (const auto& e : m.entries())
    if ((e.matrix() * e.matrix() - e.matrix()).norm() > tol) return false;
  return true;
}

RealMatrix permutation_matrix(const std::vector<Index>& permutation) {
  const Index d = static_cast<Index>(permutation.size());
  RealMatrix p = RealMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) p(i, permutation[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

namespace {

constexpr double kSupport = 1e-12;

// Perfect matching on the support of m by augmenting paths; rows in order,
// columns tried in ascending order.
std::optional<std::vector<Index>> support_matching(const RealMatrix& m) {
  const Index d = m.rows();
  std::vector<Index> row_of(static_cast<std::size_t>(d), -1);
  std::vector<char> seen;
  std::function<bool(Index)> augment = [&](Index r) {
    for (Index c = 0; c < d; ++c) {
      if (m(r, c) <= kSupport || seen[static_cast<std::size_t>(c)]) continue;
      seen[static_cast<std::size_t>(c)] = 1;
      Index& owner = row_of[static_cast<std::size_t>(c)];
      if (owner < 0 || augment(owner)) {
        owner = r;
        return true;
      }
    }
    return false;
  };
  for (Index r = 0; r < d; ++r) {
    seen.assign(static_cast<std::size_t>(d), 0);
    if (!augment(r)) return std::nullopt;
  }
  std::vector<Index> perm(static_cast<std::size_t>(d));
  for (Index c = 0; c < d; ++c) perm[static_cast<std::size_t>(row_of[static_cast<std::size_t>(c)])] = c;
  return perm;
}

// Drops terms until the permutation matrices are affinely independent.
void caratheodory_reduce(std::vector<BirkhoffTerm>& terms, Index d) {
  const std::size_t cap = static_cast<std::size_t>((d - 1) * (d - 1) + 1);
  while (terms.size() > cap) {
    const Index k = static_cast<Index>(terms.size());
    RealMatrix a(d * d + 1, k);
    for (Index t = 0; t < k; ++t) {
      a.col(t).head(d * d) = permutation_matrix(terms[static_cast<std::size_t>(t)].permutation).reshaped();
      a(d * d, t) = 1.0;
    }
    Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
    RealVector mu = svd.matrixV().col(k - 1);
    if (mu.maxCoeff() <= 0.0) mu = -mu;
    double step = std::numeric_limits<double>::infinity();
    Index hit = -1;
    for (Index t = 0; t < k; ++t)
      if (mu(t) > 1e-14) {
        const double r = terms[static_cast<std::size_t>(t)].weight / mu(t);
        if (r < step) {
          step = r;
          hit = t;
        }
      }
    for (Index t = 0; t < k; ++t) terms[static_cast<std::size_t>(t)].weight -= step * mu(t);
    terms.erase(terms.begin() + hit);
    std::erase_if(terms, [](const BirkhoffTerm& t) { return t.weight <= 1e-15; });
  }
}

}  // namespace

std::vector<BirkhoffTerm> birkhoff_decompose(const RealMatrix& m, double tol) {
  const Index d = m.rows();
  require(d >= 1 && m.cols() == d, ErrorKind::InvalidInput, "Birkhoff input must be square");
  require(m.allFinite(), ErrorKind::InvalidInput, "Birkhoff input has non-finite entries");
  require(m.minCoeff() >= -tol, ErrorKind::InvalidInput, "matrix has negative entries");
  for (Index i = 0; i < d; ++i)
    require(std::abs(m.row(i).sum() - 1.0) <= tol && std::abs(m.col(i).sum() - 1.0) <= tol,
            ErrorKind::InvalidInput, "matrix is not doubly stochastic");

  RealMatrix rest = m.cwiseMax(0.0);
  std::map<std::vector<Index>, double> merged;
  while (rest.maxCoeff() > kSupport) {
    const auto perm = support_matching(rest);
    if (!perm) break;  // leftover mass is rounding noise
    double w = std::numeric_limits<double>::infinity();
    Index argmin = 0;
    for (Index i = 0; i < d; ++i) {
      const double v = rest(i, (*perm)[static_cast<std::size_t>(i)]);
      if (v < w) {
        w = v;
        argmin = i;
      }
    }
    for (Index i = 0; i < d; ++i) rest(i, (*perm)[static_cast<std::size_t>(i)]) -= w;
    rest(argmin, (*perm)[static_cast<std::size_t>(argmin)]) = 0.0;
    merged[*perm] += w;
  }
  require(rest.sum() <= std::max(tol, 1e-9) * static_cast<double>(d), ErrorKind::InternalInconsistency,
          "Birkhoff peeling left mass " + std::to_string(rest.sum()));

  std::vector<BirkhoffTerm> terms;
  for (const auto& [perm, w] : merged) terms.push_back({w, perm});
  // Larger weights first reads better and keeps the output deterministic.
  std::stable_sort(terms.begin(), terms.end(),
                   [](const BirkhoffTerm& a, const BirkhoffTerm& b) { return a.weight > b.weight; });
  caratheodory_reduce(terms, d);

  // Weights below tol are peeling noise; fold their mass back proportionally.
  double total = 0.0, kept = 0.0;
  for (const auto& t : terms) total += t.weight;
  std::erase_if(terms, [tol](const BirkhoffTerm& t) { return t.weight < tol; });
  for (const auto& t : terms) kept += t.weight;
  require(kept > 0.0, ErrorKind::InternalInconsistency, "Birkhoff decomposition lost all weight");
  for (auto& t : terms) t.weight *= total / kept;
  return terms;
}

Povm::Povm(std::vector<HermitianMatrix> effects, double tol, double sum_tol)
    : effects_(std::move(effects)) {
  require(!effects_.empty(), ErrorKind::InvalidInput, "POVM needs at least one effect");
  const Index m = effects_.front().dim();
  require(m >= 1, ErrorKind::InvalidInput, "POVM effects are empty");
  ComplexMatrix total = -ComplexMatrix::Identity(m, m);
  for (std::size_t i = 0; i < effects_.size(); ++i) {
    require(effects_[i].dim() == m, ErrorKind::InvalidInput, "POVM effects must share one size");
    require(is_psd(effects_[i], tol), ErrorKind::InvalidInput,
            "POVM effect " + std::to_string(i) + " is not psd");
    total += effects_[i].matrix();
  }
  require(total.norm() <= sum_tol, ErrorKind::InvalidInput,
          "POVM effects sum to I only within " + std::to_string(total.norm()));
}

NaimarkDilation naimark_dilate(const Povm& p) {
  const Index m = p.dim();
  const Index k = static_cast<Index>(p.outcomes());
  NaimarkDilation out;
  out.isometry = ComplexMatrix::Zero(m * k, m);
  for (Index i = 0; i < k; ++i) {
    RealVector diag = RealVector::Zero(m * k);
    diag.segment(i * m, m).setOnes();
    out.pvm.push_back(HermitianMatrix::diagonal(diag));
    out.isometry.block(i * m, 0, m, m) = psd_sqrt(p[static_cast<std::size_t>(i)]).matrix();
  }
  return out;
}

double NaimarkResiduals::max() const {
  return std::max({projection, orthogonality, completeness, isometry, marginal});
}

NaimarkResiduals naimark_residuals(const NaimarkDilation& dil, const Povm& p) {
  NaimarkResiduals r;
  const Index n = dil.isometry.rows();
  const Index m = dil.isometry.cols();
  require(dil.pvm.size() == p.outcomes() && m == p.dim(), ErrorKind::InvalidInput,
          "dilation does not match the POVM");
  ComplexMatrix total = -ComplexMatrix::Identity(n, n);
  for (std::size_t i = 0; i < dil.pvm.size(); ++i) {
    const ComplexMatrix& s = dil.pvm[i].matrix();
    r.projection = std::max(r.projection, (s * s - s).norm());
    for (std::size_t j = i + 1; j < dil.pvm.size(); ++j)
      r.orthogonality = std::max(r.orthogonality, (s * dil.pvm[j].matrix()).norm());
    total += s;
    r.marginal = std::max(r.marginal,
                          (dil.isometry.adjoint() * s * dil.isometry - p[i].matrix()).norm());
  }
  r.completeness = total.norm();
  r.isometry = (dil.isometry.adjoint() * dil.isometry - ComplexMatrix::Identity(m, m)).norm();
  return r;
}

}  // namespace freeconvex
