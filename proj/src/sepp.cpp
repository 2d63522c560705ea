#include "freeconvex/sepp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "freeconvex/parallel.hpp"
#include "freeconvex/random.hpp"

namespace freeconvex {

const char* to_string(ConeKind k) {
  switch (k) {
    case ConeKind::Simplex: return "simplex";
    case ConeKind::Ray: return "ray";
    case ConeKind::Nonsalient: return "nonsalient";
    case ConeKind::Full: return "full";
    case ConeKind::Zero: return "zero";
  }
  return "unknown";
}

const char* to_string(SeparabilityVerdict v) {
  switch (v) {
    case SeparabilityVerdict::Separable: return "separable";
    case SeparabilityVerdict::Entangled: return "entangled";
    case SeparabilityVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

ChoiMatrix::ChoiMatrix(HermitianMatrix c, Index input_dim, Index output_dim)
    : c_(std::move(c)), d_(input_dim), s_(output_dim) {
  require(d_ >= 1 && s_ >= 1 && d_ * s_ == c_.dim(), ErrorKind::InvalidInput,
          "Choi matrix dimension does not match input/output dimensions");
}

ChoiMatrix choi_of_map(const std::vector<ComplexMatrix>& images, Index d, Index s) {
  require(d >= 1 && s >= 1 && images.size() == static_cast<std::size_t>(d * d),
          ErrorKind::InvalidInput, "need d^2 basis images");
  ComplexMatrix c(d * s, d * s);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      const ComplexMatrix& img = images[static_cast<std::size_t>(i * d + j)];
      require(img.rows() == s && img.cols() == s, ErrorKind::InvalidInput,
              "basis image has the wrong size");
      c.block(i * s, j * s, s, s) = img;
    }
  try {
    return ChoiMatrix(HermitianMatrix(c), d, s);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidMap,
                std::string("map does not preserve Hermiticity: ") + e.what());
  }
}

ChoiMatrix choi_of_kraus(const std::vector<ComplexMatrix>& kraus) {
  require(!kraus.empty(), ErrorKind::InvalidInput, "empty Kraus family");
  const Index s = kraus.front().rows(), d = kraus.front().cols();
  std::vector<ComplexMatrix> images;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      ComplexMatrix img = ComplexMatrix::Zero(s, s);
      for (const auto& k : kraus) {
        require(k.rows() == s && k.cols() == d, ErrorKind::InvalidInput, "Kraus operators differ in shape");
        img += k.col(i) * k.col(j).adjoint();
      }
      images.push_back(img);
    }
  return choi_of_map(images, d, s);
}

bool is_completely_positive(const ChoiMatrix& c, double tol) { return is_psd(c.matrix(), tol); }

namespace {

// (x^dagger (x) I) C (x (x) I)
ComplexMatrix condition_left(const ChoiMatrix& c, const ComplexVector& x) {
  const Index d = c.input_dim(), s = c.output_dim();
  const ComplexMatrix& m = c.matrix().matrix();
  ComplexMatrix out = ComplexMatrix::Zero(s, s);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out += std::conj(x(i)) * x(j) * m.block(i * s, j * s, s, s);
  return out;
}

// (I (x) y^dagger) C (I (x) y)
ComplexMatrix condition_right(const ChoiMatrix& c, const ComplexVector& y) {
  const Index d = c.input_dim(), s = c.output_dim();
  const ComplexMatrix& m = c.matrix().matrix();
  ComplexMatrix out(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out(i, j) = y.dot(m.block(i * s, j * s, s, s) * y);
  return out;
}

std::pair<double, ComplexVector> lowest(const ComplexMatrix& m) {
  const EigenDecomposition ed = eigh(HermitianMatrix::hermitian_part(m));
  return {ed.eigenvalues(0), ed.eigenvectors.col(0)};
}

double product_value(const ChoiMatrix& c, const ComplexVector& x, const ComplexVector& y) {
  return y.dot(condition_left(c, x) * y).real();
}

}  // namespace

BlockPositivityResult block_positivity_search(const ChoiMatrix& c, int iterations, int seeds,
                                              std::uint64_t seed, double tol) {
  require(iterations >= 1 && seeds >= 1, ErrorKind::InvalidInput,
          "block positivity search needs at least one iteration and one seed");
  struct Run {
    double value;
    ComplexVector x, y;
  };
  std::vector<Run> runs(static_cast<std::size_t>(seeds));
  parallel_for(runs.size(), [&](std::size_t k) {
    Rng rng(derive_seed(seed, k));
    ComplexVector x = random_unit_vector(c.input_dim(), rng);
    auto [value, y] = lowest(condition_left(c, x));
    for (int it = 0; it < iterations; ++it) {
      x = lowest(condition_right(c, y)).second;
      auto [v, ynew] = lowest(condition_left(c, x));
      y = ynew;
      const bool stalled = value - v <= 1e-15 * std::max(1.0, std::abs(value));
      value = v;
      if (stalled) break;
    }
    runs[k] = {product_value(c, x, y), x, y};
  });
  BlockPositivityResult out;
  out.seeds_run = runs.size();
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].value < runs[best].value) best = k;
  out.value = runs[best].value;
  out.x = runs[best].x;
  out.y = runs[best].y;
  out.violation_found = out.value < -tol * std::max(1.0, c.matrix().norm());
  return out;
}

double product_probe_min(const ChoiMatrix& c, std::size_t probes, std::uint64_t seed) {
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < probes; ++k) {
    const ComplexVector x = random_unit_vector(c.input_dim(), rng);
    const ComplexVector y = random_unit_vector(c.output_dim(), rng);
    best = std::min(best, product_value(c, x, y));
  }
  return best;
}

SchmidtDecomposition operator_schmidt(const HermitianMatrix& rho, Index d, Index s, double tol) {
  const ComplexMatrix r = realign(rho, d, s);
  const std::vector<HermitianMatrix> gb = hermitian_basis(d);
  const std::vector<HermitianMatrix> hb = hermitian_basis(s);
  // Rows hold row-major vec(G^T), so Phi_G R Phi_H^T = [tr(rho (G_a (x) H_b))].
  auto transposed_vecs = [](const std::vector<HermitianMatrix>& basis, Index n) {
    ComplexMatrix phi(n * n, n * n);
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) phi(static_cast<Index>(a), i * n + j) = basis[a](j, i);
    return phi;
  };
  const ComplexMatrix coeff = transposed_vecs(gb, d) * r * transposed_vecs(hb, s).transpose();
  const RealMatrix c = coeff.real();
  Eigen::JacobiSVD<RealMatrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();

  SchmidtDecomposition out;
  if (sv.size() == 0 || sv(0) == 0.0) return out;
  for (Index m = 0; m < sv.size() && sv(m) >= tol * sv(0); ++m) ++out.rank;
  out.singular_values = sv.head(out.rank);
  ComplexMatrix rebuilt = ComplexMatrix::Zero(d * s, d * s);
  for (Index m = 0; m < out.rank; ++m) {
    const double w = std::sqrt(sv(m));
    ComplexMatrix left = ComplexMatrix::Zero(d, d), right = ComplexMatrix::Zero(s, s);
    for (std::size_t a = 0; a < gb.size(); ++a) left += svd.matrixU()(static_cast<Index>(a), m) * gb[a].matrix();
    for (std::size_t b = 0; b < hb.size(); ++b) right += svd.matrixV()(static_cast<Index>(b), m) * hb[b].matrix();
    out.left.push_back(HermitianMatrix::hermitian_part(left * w));
    out.right.push_back(HermitianMatrix::hermitian_part(right * w));
    rebuilt += kron(out.left.back().matrix(), out.right.back().matrix());
  }
  // Truncation at tol * sigma_max leaves at most sqrt(#dropped) * tol relative error.
  const double err = (rebuilt - rho.matrix()).norm();
  const double dropped = sv.tail(sv.size() - out.rank).norm();
  require(err <= dropped + 1e-9 * std::max(1.0, rho.norm()), ErrorKind::NumericalDegeneracy,
          "operator Schmidt reconstruction error " + std::to_string(err));
  return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<double, 2> direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Columns spanning the complement of ker(sigma1) cap ker(sigma2).
ComplexMatrix joint_range(const HermitianMatrix& a, const HermitianMatrix& b) {
  const Index n = a.dim();
  ComplexMatrix stacked(2 * n, n);
  stacked << a.matrix(), b.matrix();
  Eigen::JacobiSVD<ComplexMatrix> svd(stacked, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  Index keep = 0;
  while (keep < sv.size() && sv(keep) > 1e-12 * sv(0)) ++keep;
  return svd.matrixV().leftCols(keep);
}

}  // namespace

ConeRays2D cone_rays_2d(const HermitianMatrix& sigma1, const HermitianMatrix& sigma2) {
  require(sigma1.dim() == sigma2.dim() && sigma1.dim() >= 1, ErrorKind::InvalidInput,
          "cone_rays_2d needs two matrices of one size");
  ConeRays2D out;
  const double scale = std::max(sigma1.norm(), sigma2.norm());
  if (scale == 0.0) {
    out.kind = ConeKind::Full;
    return out;
  }
  const ComplexMatrix q = joint_range(sigma1, sigma2);
  const HermitianMatrix a = HermitianMatrix::hermitian_part(q.adjoint() * sigma1.matrix() * q / scale);
  const HermitianMatrix b = HermitianMatrix::hermitian_part(q.adjoint() * sigma2.matrix() * q / scale);
  auto f = [&](double theta) {
    return min_eigenvalue(a * std::cos(theta) + b * std::sin(theta));
  };
  const double ftol = 1e-10;

  // Coarse scan, then golden-section refinement of the maximizer.
  const int grid = 720;
  const double h = kTwoPi / grid;
  double best_theta = 0.0, best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const double v = f(k * h);
    if (v > best) {
      best = v;
      best_theta = k * h;
    }
  }
  {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_theta - h, hi = best_theta + h;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-13) {
      if (f1 < f2) {
        lo = x1; x1 = x2; f1 = f2; x2 = lo + phi * (hi - lo); f2 = f(x2);
      } else {
        hi = x2; x2 = x1; f2 = f1; x1 = hi - phi * (hi - lo); f1 = f(x1);
      }
    }
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm >= best) {
      best = fm;
      best_theta = mid;
    }
  }

  if (best < -ftol) {
    out.kind = ConeKind::Zero;
    return out;
  }
  const double opposite = f(best_theta + std::numbers::pi);
  if (best <= ftol) {
    if (opposite >= -ftol) {
      out.kind = ConeKind::Nonsalient;
      out.rays = {direction(best_theta), direction(best_theta + std::numbers::pi)};
    } else {
      out.kind = ConeKind::Ray;
      out.rays = {direction(best_theta)};
    }
    return out;
  }

  // Interior point found: bisect for the arc endpoints; `in` stays feasible.
  auto boundary = [&](double sign) {
    double in = best_theta, outside = best_theta + sign * std::numbers::pi;
    if (f(outside) >= 0.0) return outside;
    while (std::abs(outside - in) > 1e-12) {
      const double mid = 0.5 * (in + outside);
      (f(mid) >= 0.0 ? in : outside) = mid;
    }
    return in;
  };
  const double lo = boundary(-1.0), hi = boundary(1.0);
  out.rays = {direction(lo), direction(hi)};
  out.kind = hi - lo >= std::numbers::pi - 1e-9 ? ConeKind::Nonsalient : ConeKind::Simplex;
  return out;
}

namespace {

// Flips (P, T) -> (-P, -T) when P is mostly negative, clips roundoff-level
// negative eigenvalues and normalizes tr P = 1.
ProductTerm clean_term(HermitianMatrix p, HermitianMatrix t, double tol) {
  const RealVector ev = eigvalsh(p);
  if (std::abs(ev(0)) > std::abs(ev(ev.size() - 1))) {
    p = -p;
    t = -t;
  }
  auto clip = [tol](const HermitianMatrix& m, const char* which) {
    const EigenDecomposition ed = eigh(m);
    const double sc = std::max(1e-300, ed.eigenvalues.cwiseAbs().maxCoeff());
    require(ed.eigenvalues(0) >= -std::max(tol, 1e-8) * sc, ErrorKind::InternalInconsistency,
            std::string("rank-2 separable factor (") + which + ") not psd: lambda_min = " +
                std::to_string(ed.eigenvalues(0)) + " relative to " + std::to_string(sc));
    if (ed.eigenvalues(0) >= 0.0) return m;
    const RealVector lam = ed.eigenvalues.cwiseMax(0.0);
    return HermitianMatrix::hermitian_part(ed.eigenvectors * lam.cast<Complex>().asDiagonal() *
                                           ed.eigenvectors.adjoint());
  };
  p = clip(p, "left");
  t = clip(t, "right");
  const double tr = p.trace();
  if (tr > 0.0) {
    p = p * (1.0 / tr);
    t = t * tr;
  }
  return {p, t};
}

// Returns (u, combined) when x1, x2 are linearly dependent: x_k ~ u_k * combined.
std::optional<std::pair<std::array<double, 2>, HermitianMatrix>> dependent_pair(
    const HermitianMatrix& x1, const HermitianMatrix& x2) {
  const Index n = x1.dim();
  ComplexMatrix cols(n * n, 2);
  cols.col(0) = x1.matrix().reshaped();
  cols.col(1) = x2.matrix().reshaped();
  // Hermitian matrices have real trace inner products, so the Gram matrix is real.
  Eigen::JacobiSVD<ComplexMatrix> svd(cols, Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  if (sv(0) == 0.0) return std::pair{std::array<double, 2>{1.0, 0.0}, x1};
  if (sv(1) > 1e-10 * sv(0)) return std::nullopt;
  ComplexVector v = svd.matrixV().col(0);
  // Remove the global phase so the combination weights are real.
  const Index piv = std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1;
  v *= std::conj(v(piv)) / std::abs(v(piv));
  std::array<double, 2> u{v(0).real(), v(1).real()};
  const double norm = std::hypot(u[0], u[1]);
  u = {u[0] / norm, u[1] / norm};
  return std::pair{u, x1 * u[0] + x2 * u[1]};
}

}  // namespace

std::vector<ProductTerm> separable_rank2(const HermitianMatrix& sigma1, const HermitianMatrix& tau1,
                                         const HermitianMatrix& sigma2, const HermitianMatrix& tau2,
                                         double tol) {
  require(sigma1.dim() == sigma2.dim() && tau1.dim() == tau2.dim() && sigma1.dim() >= 1 &&
              tau1.dim() >= 1,
          ErrorKind::InvalidInput, "rank-2 factors must have matching sizes");
  const HermitianMatrix rho = kron(sigma1, tau1) + kron(sigma2, tau2);
  require(is_psd(rho, tol), ErrorKind::PreconditionViolation,
          "sigma1 (x) tau1 + sigma2 (x) tau2 is not psd");
  const double rho_norm = rho.norm();
  if (rho_norm == 0.0) return {};

  std::vector<ProductTerm> terms;
  if (auto dep = dependent_pair(sigma1, sigma2)) {
    // sigma_k = u_k S  =>  rho = S (x) (u_1 tau1 + u_2 tau2)
    const auto& [u, s] = *dep;
    terms.push_back(clean_term(s, tau1 * u[0] + tau2 * u[1], tol));
  } else if (auto dep_t = dependent_pair(tau1, tau2)) {
    const auto& [u, t] = *dep_t;
    terms.push_back(clean_term(sigma1 * u[0] + sigma2 * u[1], t, tol));
  } else {
    const ConeRays2D cone = cone_rays_2d(sigma1, sigma2);
    if (cone.kind == ConeKind::Ray) {
      const auto& v = cone.rays[0];
      terms.push_back(clean_term(sigma1 * v[0] + sigma2 * v[1], tau1 * v[0] + tau2 * v[1], tol));
    } else if (cone.kind == ConeKind::Simplex) {
      // (tau1, tau2) = v1 (x) eta1 + v2 (x) eta2, i.e. [tau1; tau2] = V [eta1; eta2].
      const auto& v1 = cone.rays[0];
      const auto& v2 = cone.rays[1];
      const double det = v1[0] * v2[1] - v2[0] * v1[1];
      require(std::abs(det) > 1e-14, ErrorKind::InternalInconsistency,
              "simplex cone rays are numerically parallel");
      const HermitianMatrix eta1 = (tau1 * v2[1] - tau2 * v2[0]) * (1.0 / det);
      const HermitianMatrix eta2 = (tau2 * v1[0] - tau1 * v1[1]) * (1.0 / det);
      terms.push_back(clean_term(sigma1 * v1[0] + sigma2 * v1[1], eta1, tol));
      terms.push_back(clean_term(sigma1 * v2[0] + sigma2 * v2[1], eta2, tol));
    } else {
      throw Error(ErrorKind::InternalInconsistency,
                  std::string("unexpected ") + to_string(cone.kind) +
                      " cone for linearly independent factors");
    }
  }

  ComplexMatrix rebuilt = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& [p, t] : terms) rebuilt += kron(p.matrix(), t.matrix());
  const double err = (rebuilt - rho.matrix()).norm() / rho_norm;
  require(err <= 1e-8, ErrorKind::InternalInconsistency,
          "rank-2 separable decomposition residual " + std::to_string(err));
  return terms;
}

SeparabilityVerdict separability_oracle_small(const HermitianMatrix& rho, Index d, Index s,
                                              double tol) {
  require(d >= 1 && s >= 1 && d * s == rho.dim(), ErrorKind::InvalidInput,
          "state dimension does not match d*s");
  require(is_psd(rho, tol), ErrorKind::PreconditionViolation, "separability oracle needs a psd input");
  if (!is_psd(partial_transpose(rho, d, s), tol)) return SeparabilityVerdict::Entangled;
  if (d == 1 || s == 1 || d * s <= 6) return SeparabilityVerdict::Separable;
  return SeparabilityVerdict::Inconclusive;
}

}  // namespace freeconvex
