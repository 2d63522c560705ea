#include "freeconvex/tensornet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "freeconvex/lp.hpp"
#include "freeconvex/parallel.hpp"

namespace freeconvex {

Mpdo::Mpdo(Index bond_dim, std::vector<std::vector<ComplexMatrix>> tensors)
    : r_(bond_dim), tensors_(std::move(tensors)) {
  require(r_ >= 1, ErrorKind::InvalidInput, "bond dimension must be positive");
  require(!tensors_.empty(), ErrorKind::InvalidInput, "MPDO needs at least one site");
  for (const auto& site : tensors_) {
    require(site.size() == static_cast<std::size_t>(r_ * r_), ErrorKind::InvalidInput,
            "every site needs r*r blocks");
    const Index d = site.front().rows();
    require(d >= 1, ErrorKind::InvalidInput, "physical dimension must be positive");
    for (const auto& b : site) {
      require(b.rows() == d && b.cols() == d, ErrorKind::InvalidInput,
              "blocks of one site must be square and share one size");
      require(all_finite(b), ErrorKind::InvalidInput, "MPDO block has non-finite entries");
    }
  }
}

std::vector<Index> Mpdo::phys_dims() const {
  std::vector<Index> dims;
  for (Index j = 0; j < sites(); ++j) dims.push_back(phys_dim(j));
  return dims;
}

TiTensor::TiTensor(Index bond_dim, std::vector<ComplexMatrix> blocks)
    : r_(bond_dim), blocks_(std::move(blocks)) {
  require(r_ >= 1 && blocks_.size() == static_cast<std::size_t>(r_ * r_), ErrorKind::InvalidInput,
          "tensor needs r*r blocks");
  const Index d = blocks_.front().rows();
  require(d >= 1, ErrorKind::InvalidInput, "physical dimension must be positive");
  for (const auto& b : blocks_)
    require(b.rows() == d && b.cols() == d && all_finite(b), ErrorKind::InvalidInput,
            "blocks must be finite, square and share one size");
}

Mpdo TiTensor::ring(Index n) const {
  require(n >= 1, ErrorKind::InvalidInput, "ring needs at least one site");
  return Mpdo(r_, std::vector<std::vector<ComplexMatrix>>(static_cast<std::size_t>(n), blocks_));
}

DenseMpdo mpdo_to_dense(const Mpdo& m, Index cap) {
  double total = 1.0;
  for (Index d : m.phys_dims()) total *= static_cast<double>(d);
  require(total <= static_cast<double>(cap), ErrorKind::SizeLimit, "dense MPDO exceeds the dimension cap");
  const Index r = m.bond_dim(), n = m.sites(), dim = static_cast<Index>(total);

  DenseMpdo out;
  out.matrix = ComplexMatrix::Zero(dim, dim);
  for (Index first = 0; first < r; ++first) {
    // acc[i] = sum over bonds so far, ending on bond index i.
    std::vector<ComplexMatrix> acc;
    for (Index i = 0; i < r; ++i) acc.push_back(m.block(0, first, i));
    for (Index j = 1; j < n; ++j) {
      std::vector<ComplexMatrix> next;
      for (Index to = 0; to < r; ++to) {
        ComplexMatrix sum;
        for (Index from = 0; from < r; ++from) {
          ComplexMatrix term = kron(acc[static_cast<std::size_t>(from)], m.block(j, from, to), cap);
          if (sum.size() == 0) sum = std::move(term);
          else sum += term;
        }
        next.push_back(std::move(sum));
      }
      acc = std::move(next);
    }
    out.matrix += acc[static_cast<std::size_t>(first)];
  }
  out.asymmetry = (out.matrix - out.matrix.adjoint()).norm() / std::max(1.0, out.matrix.norm());
  out.hermitian = out.asymmetry <= 1e-12;
  return out;
}

namespace {

// Transfer matrix of one site for the k-th moment. Row and column indices are
// k-digit base-r numbers, first digit most significant.
ComplexMatrix transfer_matrix(const Mpdo& m, Index site, int k, Index size) {
  const Index r = m.bond_dim();
  const Index d = m.phys_dim(site);
  ComplexMatrix t(size, size);
  parallel_for(static_cast<std::size_t>(size), [&](std::size_t row_index) {
    const Index row = static_cast<Index>(row_index);
    std::vector<Index> digits(static_cast<std::size_t>(k));
    for (int l = k - 1, code = static_cast<int>(row); l >= 0; --l, code /= static_cast<int>(r))
      digits[static_cast<std::size_t>(l)] = code % r;
    std::vector<ComplexMatrix> prefix(static_cast<std::size_t>(k) + 1);
    prefix[0] = ComplexMatrix::Identity(d, d);
    auto descend = [&](auto&& self, int level, Index col) -> void {
      if (level == k) {
        t(row, col) = prefix[static_cast<std::size_t>(level)].trace();
        return;
      }
      for (Index c = 0; c < r; ++c) {
        prefix[static_cast<std::size_t>(level) + 1] =
            prefix[static_cast<std::size_t>(level)] * m.block(site, digits[static_cast<std::size_t>(level)], c);
        self(self, level + 1, col * r + c);
      }
    };
    descend(descend, 0, 0);
  });
  return t;
}

}  // namespace

Complex mpdo_moment(const Mpdo& m, int k, Index cap) {
  require(k >= 1, ErrorKind::InvalidInput, "moment order must be positive");
  const double size = std::pow(static_cast<double>(m.bond_dim()), k);
  require(size <= static_cast<double>(cap), ErrorKind::SizeLimit, "transfer matrix exceeds the size cap");
  const Index n = static_cast<Index>(size);
  ComplexMatrix product = transfer_matrix(m, 0, k, n);
  for (Index j = 1; j < m.sites(); ++j) product = product * transfer_matrix(m, j, k, n);
  return product.trace();
}

HermitianMatrix tau_n(const TiTensor& t, Index n, Index cap) {
  const DenseMpdo dense = mpdo_to_dense(t.ring(n), cap);
  require(dense.asymmetry <= 1e-10, ErrorKind::InvalidInput, "tau_n is not Hermitian");
  return HermitianMatrix::hermitian_part(dense.matrix);
}

const char* to_string(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::Psd: return "psd";
    case ScanVerdict::NotPsd: return "notPsd";
    case ScanVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

MomentVector make_moment_vector(double dim, RealVector moments,
                                std::optional<std::pair<double, double>> interval) {
  require(dim >= 0.0 && std::isfinite(dim), ErrorKind::InvalidInput, "dimension must be nonnegative");
  require(moments.allFinite(), ErrorKind::InvalidInput, "moments must be finite");
  MomentVector mv;
  mv.dim = dim;
  mv.moments = std::move(moments);
  if (interval) {
    require(interval->first <= interval->second, ErrorKind::InvalidInterval,
            "interval lower end exceeds the upper end");
    mv.lower = interval->first;
    mv.upper = interval->second;
  } else {
    require(mv.count() >= 2, ErrorKind::InvalidInput, "default interval needs the second moment");
    require(mv.moments(1) >= -1e-12, ErrorKind::InvalidInput, "second moment must be nonnegative");
    const double b = std::sqrt(std::max(mv.moments(1), 0.0));
    mv.lower = -b;
    mv.upper = b;
  }
  return mv;
}

MomentVector mpdo_moment_vector(const Mpdo& m, int count, Index cap) {
  RealVector moments(count);
  for (int k = 1; k <= count; ++k) moments(k - 1) = mpdo_moment(m, k, cap).real();
  double dim = 1.0;
  for (Index d : m.phys_dims()) dim *= static_cast<double>(d);
  return make_moment_vector(dim, std::move(moments));
}

namespace {

double negative_part(double x) { return std::max(-x, 0.0); }

double chebyshev_t(int j, double t) { return std::cos(j * std::acos(std::clamp(t, -1.0, 1.0))); }

// Integral of T_j over [-1, 1].
double chebyshev_integral(int j) { return j % 2 == 1 ? 0.0 : 2.0 / (1.0 - static_cast<double>(j) * j); }

double chebyshev_node(Index i, Index count) {
  return std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1));
}

// Monomial coefficients in t of sum_j c_j T_j(t).
RealVector chebyshev_to_monomial(const RealVector& c) {
  const Index n = c.size();
  RealVector out = RealVector::Zero(n);
  RealVector prev = RealVector::Zero(n), cur = RealVector::Zero(n);
  prev(0) = 1.0;  // T_0
  if (n > 1) cur(1) = 1.0;  // T_1
  out += c(0) * prev;
  if (n > 1) out += c(1) * cur;
  for (Index j = 2; j < n; ++j) {
    RealVector next = -prev;
    for (Index p = 0; p + 1 < n; ++p) next(p + 1) += 2.0 * cur(p);
    out += c(j) * next;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

// Chebyshev coefficients of the derivative in t.
RealVector chebyshev_derivative(const RealVector& c) {
  const Index n = c.size() - 1;
  if (n < 1) return RealVector();
  RealVector d = RealVector::Zero(n);
  for (Index k = n; k >= 1; --k) d(k - 1) = (k + 1 < n ? d(k + 1) : 0.0) + 2.0 * static_cast<double>(k) * c(k);
  d(0) *= 0.5;
  return d;
}

// Real roots in [-1, 1] of a Chebyshev series, from the colleague matrix.
std::vector<double> chebyshev_real_roots(const RealVector& c) {
  Index n = c.size() - 1;
  const double scale = c.cwiseAbs().maxCoeff();
  while (n >= 1 && std::abs(c(n)) <= 1e-14 * scale) --n;
  std::vector<double> roots;
  if (n < 1) return roots;
  RealMatrix m = RealMatrix::Zero(n, n);
  if (n == 1) {
    roots.push_back(std::clamp(-c(0) / c(1), -1.0, 1.0));
    return roots;
  }
  m(0, 1) = 1.0;
  for (Index j = 1; j < n; ++j) {
    m(j, j - 1) = 0.5;
    if (j + 1 < n) m(j, j + 1) = 0.5;
  }
  for (Index k = 0; k < n; ++k) m(n - 1, k) -= c(k) / (2.0 * c(n));
  const Eigen::EigenSolver<RealMatrix> es(m, false);
  for (Index i = 0; i < n; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) <= 1e-6 && z.real() >= -1.0 - 1e-9 && z.real() <= 1.0 + 1e-9)
      roots.push_back(std::clamp(z.real(), -1.0, 1.0));
  }
  return roots;
}

}  // namespace

double PolyBound::operator()(double x) const {
  const double t = (2.0 * x - lower - upper) / (upper - lower);
  double v = 0.0;
  for (Index j = 0; j < chebyshev.size(); ++j) v += chebyshev(j) * chebyshev_t(static_cast<int>(j), t);
  return v;
}

PolyBound poly_bound(double lower, double upper, int degree, BoundSide side) {
  require(std::isfinite(lower) && std::isfinite(upper) && lower < upper, ErrorKind::InvalidInterval,
          "polynomial bound needs a nondegenerate finite interval");
  require(degree >= 0 && degree <= kMaxPolyDegree, ErrorKind::InvalidInput, "degree must be in [0, 40]");
  const Index terms = degree + 1;
  const double mid = 0.5 * (lower + upper), half = 0.5 * (upper - lower);
  const double sign = side == BoundSide::Upper ? 1.0 : -1.0;
  const double kink = -mid / half;  // t where x = 0

  std::vector<double> nodes;
  const Index count = std::max<Index>(20 * static_cast<Index>(degree) + 1, 2);
  for (Index i = 0; i < count; ++i) nodes.push_back(chebyshev_node(i, count));
  if (kink > -1.0 && kink < 1.0) nodes.push_back(kink);

  // The LP over the coefficients (minimize the integral of sign * q subject to
  // sign * q >= sign * g on the nodes) is solved through its dual, which has
  // one row per coefficient:  max (sign g)^T y  s.t.  A^T y = w, y >= 0.
  const Index n = static_cast<Index>(nodes.size());
  LinearProgram lp;
  lp.cost.resize(n);
  lp.eq.resize(terms, n);
  lp.eq_rhs.resize(terms);
  for (Index j = 0; j < terms; ++j) lp.eq_rhs(j) = half * chebyshev_integral(static_cast<int>(j));
  for (Index i = 0; i < n; ++i) {
    const double t = nodes[static_cast<std::size_t>(i)];
    for (Index j = 0; j < terms; ++j) lp.eq(j, i) = chebyshev_t(static_cast<int>(j), t);
    lp.cost(i) = -sign * negative_part(mid + half * t);
  }
  const LpSolution sol = solve_lp(lp);
  require(sol.status == LpStatus::Optimal, ErrorKind::InternalInconsistency,
          "polynomial bound LP did not reach an optimum");

  PolyBound q;
  q.degree = degree;
  q.lower = lower;
  q.upper = upper;
  q.side = side;
  q.chebyshev = -sign * sol.duals.head(terms);

  // Largest violation of sign * (g - q): on each linear piece of g it sits at
  // an endpoint, the kink, or a root of q' = g'.
  const RealVector dq = chebyshev_derivative(q.chebyshev);
  std::vector<double> candidates{-1.0, 1.0};
  if (kink > -1.0 && kink < 1.0) candidates.push_back(kink);
  for (double slope : {0.0, -half}) {
    RealVector shifted = dq;
    if (shifted.size() == 0) break;
    shifted(0) -= slope;
    for (double t : chebyshev_real_roots(shifted)) candidates.push_back(t);
  }
  for (Index i = 0; i < 10 * count; ++i) candidates.push_back(chebyshev_node(i, 10 * count));
  double violation = 0.0;
  for (double t : candidates) {
    const double x = mid + half * t;
    violation = std::max(violation, sign * (negative_part(x) - q(x)));
  }
  q.grid_error = violation;
  q.chebyshev(0) += sign * violation;

  double integral_q = 0.0;
  for (Index j = 0; j < terms; ++j) integral_q += half * chebyshev_integral(static_cast<int>(j)) * q.chebyshev(j);
  const double neg_end = std::min(upper, 0.0);
  const double integral_g = lower < 0.0 ? 0.5 * (lower * lower - neg_end * neg_end) : 0.0;
  q.integral_gap = std::abs(integral_q - integral_g);
  return q;
}

namespace {

// tr q(rho) from moments, through the rescaled variable t = (2x - a - b)/(b - a).
double trace_of(const PolyBound& q, const MomentVector& mv) {
  const Index terms = q.chebyshev.size();
  const double alpha = 2.0 / (q.upper - q.lower);
  const double beta = -(q.lower + q.upper) / (q.upper - q.lower);
  auto moment = [&](Index j) { return j == 0 ? mv.dim : mv.moments(j - 1); };
  const RealVector mono = chebyshev_to_monomial(q.chebyshev);
  double total = 0.0;
  for (Index k = 0; k < terms; ++k) {
    // tr(t(rho)^k) by the binomial expansion of (alpha x + beta)^k.
    double s = 0.0, binom = 1.0;
    for (Index j = 0; j <= k; ++j) {
      s += binom * std::pow(alpha, static_cast<double>(j)) * std::pow(beta, static_cast<double>(k - j)) * moment(j);
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
    total += mono(k) * s;
  }
  return total;
}

}  // namespace

DistanceBounds psd_distance_bounds(const MomentVector& mv, int degree) {
  require(degree >= 1 && degree <= mv.count(), ErrorKind::InvalidInput,
          "degree exceeds the number of available moments");
  require(mv.lower <= mv.upper, ErrorKind::InvalidInterval, "interval lower end exceeds the upper end");
  DistanceBounds out;
  if (mv.lower == mv.upper) {
    out.lower = out.upper = mv.dim * negative_part(mv.lower);
    return out;
  }
  const PolyBound up = poly_bound(mv.lower, mv.upper, degree, BoundSide::Upper);
  const PolyBound lo = poly_bound(mv.lower, mv.upper, degree, BoundSide::Lower);
  out.upper = trace_of(up, mv);
  out.lower = std::max(trace_of(lo, mv), 0.0);
  const double scale = std::max(1.0, mv.dim * std::max(std::abs(mv.lower), std::abs(mv.upper)));
  require(out.lower <= out.upper + 1e-8 * scale, ErrorKind::InvalidInterval,
          "moment bounds cross: the interval does not contain the spectrum");
  out.upper = std::max(out.upper, out.lower);
  return out;
}

std::vector<TauScanEntry> tau_psd_scan(const TiTensor& t, Index n_max, double tol, Index cap) {
  require(n_max >= 1, ErrorKind::InvalidInput, "scan needs n_max >= 1");
  // Moment mode keeps transfer matrices small; 64 rows is enough for degree 6 at r = 2.
  constexpr double kTransferCap = 64;
  int degree = 0;
  while (degree < 12 && std::pow(static_cast<double>(t.bond_dim()), degree + 1) <= kTransferCap) ++degree;

  std::vector<TauScanEntry> out(static_cast<std::size_t>(n_max));
  parallel_for(out.size(), [&](std::size_t idx) {
    TauScanEntry& e = out[idx];
    e.n = static_cast<Index>(idx) + 1;
    const double dim = std::pow(static_cast<double>(t.phys_dim()), static_cast<double>(e.n));
    if (dim <= static_cast<double>(cap)) {
      e.dense = true;
      const RealVector ev = eigvalsh(tau_n(t, e.n, cap));
      e.min_eigenvalue = ev(0);
      const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
      e.verdict = ev(0) >= -tol * scale ? ScanVerdict::Psd : ScanVerdict::NotPsd;
      return;
    }
    e.moment_degree = degree;
    if (degree < 2) return;
    const MomentVector mv = mpdo_moment_vector(t.ring(e.n), degree, cap);
    const DistanceBounds b = psd_distance_bounds(mv, degree);
    e.negative_lower = b.lower;
    e.negative_upper = b.upper;
    const double scale = tol * std::max(1.0, std::sqrt(std::max(mv.moments(1), 0.0)));
    if (b.upper <= scale) e.verdict = ScanVerdict::Psd;
    else if (b.lower > scale) e.verdict = ScanVerdict::NotPsd;
  });
  return out;
}

PurificationBounds purification_bounds(const HermitianMatrix& rho, Index d, Index s, double tol) {
  require(d >= 1 && s >= 1 && rho.dim() == d * s, ErrorKind::InvalidInput, "cut dims do not match the state");
  require(is_psd(rho, tol), ErrorKind::PreconditionViolation, "purification bounds need a psd input");
  PurificationBounds out;
  // Eigenvalues at rounding level would otherwise add spurious rank to the root.
  const double floor = tol * std::max(1.0, rho.norm());
  out.purification = apply_spectral(rho, [floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
  out.upper = numerical_rank(realign(out.purification, d, s));
  const Index osr = numerical_rank(realign(rho, d, s));
  out.lower = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(osr)) - 1e-12));
  require(out.lower <= out.upper, ErrorKind::InternalInconsistency, "purification bounds are out of order");
  return out;
}

}  // namespace freeconvex
