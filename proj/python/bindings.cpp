#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "freeconvex/cli.hpp"
#include "freeconvex/conesolve.hpp"
#include "freeconvex/freespec.hpp"
#include "freeconvex/games.hpp"
#include "freeconvex/magic.hpp"
#include "freeconvex/sepp.hpp"
#include "freeconvex/tensornet.hpp"

namespace py = pybind11;
using namespace freeconvex;

namespace {

std::vector<HermitianMatrix> hermitians(const std::vector<ComplexMatrix>& ms) {
  std::vector<HermitianMatrix> out;
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

std::vector<ComplexMatrix> matrices(const std::vector<HermitianMatrix>& hs) {
  std::vector<ComplexMatrix> out;
  for (const auto& h : hs) out.push_back(h.matrix());
  return out;
}

NonlocalGame make_game(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& win,
                       const std::optional<RealMatrix>& pi) {
  require(win.ndim() == 4, ErrorKind::InvalidInput, "win table must have shape (qa, qb, aa, ab)");
  std::vector<std::uint8_t> w(win.data(), win.data() + win.size());
  const auto s = win.shape();
  if (pi) return NonlocalGame(s[0], s[1], s[2], s[3], std::move(w), *pi);
  return NonlocalGame(s[0], s[1], s[2], s[3], std::move(w));
}

py::dict solution_dict(const SdpSolution& s) {
  py::dict d;
  d["status"] = to_string(s.status);
  d["primal_objective"] = s.primal_objective;
  d["dual_objective"] = s.dual_objective;
  d["blocks"] = matrices(s.blocks);
  d["dual_multipliers"] = s.dual_multipliers;
  d["iterations"] = s.iterations;
  d["residuals"] = py::dict(py::arg("primal") = s.residuals.primal_feas, py::arg("dual") = s.residuals.dual_feas,
                            py::arg("gap") = s.residuals.gap);
  if (s.certificate) d["certificate"] = s.certificate->ray;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Free convexity and quantum information numerics";

  static py::exception<Error> error(m, "FreeconvexError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def("min_eigenvalue", [](const ComplexMatrix& h) { return min_eigenvalue(HermitianMatrix(h)); });
  m.def("eigvalsh", [](const ComplexMatrix& h) { return eigvalsh(HermitianMatrix(h)); });
  m.def("partial_transpose",
        [](const ComplexMatrix& h, Index d, Index s) { return partial_transpose(HermitianMatrix(h), d, s).matrix(); });

  m.def(
      "solve_sdp",
      [](std::vector<Index> block_dims, const std::vector<ComplexMatrix>& objective,
         const std::vector<std::pair<std::vector<ComplexMatrix>, double>>& constraints, double tol) {
        SdpProblem p;
        p.block_dims = std::move(block_dims);
        p.objective = hermitians(objective);
        for (const auto& [coeffs, rhs] : constraints) p.constraints.push_back({hermitians(coeffs), rhs});
        SdpOptions opts;
        opts.tol = tol;
        return solution_dict(solve(p, opts));
      },
      py::arg("block_dims"), py::arg("objective"), py::arg("constraints"), py::arg("tol") = 1e-7,
      "minimize sum <C_b, X_b> subject to sum_b <A_b, X_b> = rhs and X_b psd.");

  m.def(
      "jointly_measurable",
      [](const std::vector<ComplexMatrix>& effects, double tol) {
        const JointMeasurability jm = jointly_measurable(hermitians(effects), tol);
        py::dict d;
        d["verdict"] = to_string(jm.verdict);
        d["marginal_residual"] = jm.marginal_residual;
        if (jm.povm) d["joint_povm"] = matrices(jm.povm->effects);
        return d;
      },
      py::arg("effects"), py::arg("tol") = kDefaultPsdTol);
  m.def(
      "noise_threshold",
      [](const std::vector<ComplexMatrix>& effects, double width) {
        const NoiseThreshold t = noise_threshold(hermitians(effects), 0.0, 1.0, width);
        return std::make_pair(t.lower, t.upper);
      },
      py::arg("effects"), py::arg("width") = 1e-3);

  m.def("operator_schmidt", [](const ComplexMatrix& rho, Index d, Index s) {
    const SchmidtDecomposition sd = operator_schmidt(HermitianMatrix(rho), d, s);
    return py::make_tuple(sd.singular_values, matrices(sd.left), matrices(sd.right));
  });
  m.def("separable_rank2", [](const ComplexMatrix& s1, const ComplexMatrix& t1, const ComplexMatrix& s2,
                              const ComplexMatrix& t2) {
    std::vector<std::pair<ComplexMatrix, ComplexMatrix>> out;
    for (const auto& [a, b] :
         separable_rank2(HermitianMatrix(s1), HermitianMatrix(t1), HermitianMatrix(s2), HermitianMatrix(t2)))
      out.emplace_back(a.matrix(), b.matrix());
    return out;
  });
  m.def("separability_oracle", [](const ComplexMatrix& rho, Index d, Index s) {
    return std::string(to_string(separability_oracle_small(HermitianMatrix(rho), d, s)));
  });

  m.def(
      "birkhoff_decompose",
      [](const RealMatrix& mat, double tol) {
        std::vector<std::pair<double, std::vector<Index>>> out;
        for (const auto& t : birkhoff_decompose(mat, tol)) out.emplace_back(t.weight, t.permutation);
        return out;
      },
      py::arg("matrix"), py::arg("tol") = 1e-9);
  m.def("naimark_dilate", [](const std::vector<ComplexMatrix>& effects) {
    const NaimarkDilation dil = naimark_dilate(Povm(hermitians(effects)));
    return py::make_tuple(dil.isometry, matrices(dil.pvm));
  });

  m.def(
      "classical_value",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& win,
         const std::optional<RealMatrix>& pi) {
        const ClassicalValue cv = classical_value(make_game(win, pi));
        return py::make_tuple(cv.value, cv.strategy.alice, cv.strategy.bob);
      },
      py::arg("win"), py::arg("pi") = py::none());
  m.def(
      "npa_upper_bound",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& win, int level,
         const std::optional<RealMatrix>& pi) { return npa_upper_bound(make_game(win, pi), level).objective_bound; },
      py::arg("win"), py::arg("level") = 1, py::arg("pi") = py::none());

  m.def(
      "mpdo_moment",
      [](Index bond_dim, std::vector<std::vector<ComplexMatrix>> tensors, int k) {
        return mpdo_moment(Mpdo(bond_dim, std::move(tensors)), k);
      },
      py::arg("bond_dim"), py::arg("tensors"), py::arg("k"),
      "tr(rho^k); tensors[site][i * r + j] is the (i, j) block of one site.");
  m.def(
      "psd_distance_bounds",
      [](double dim, RealVector moments, int degree, std::optional<std::pair<double, double>> interval) {
        const DistanceBounds b = psd_distance_bounds(make_moment_vector(dim, std::move(moments), interval), degree);
        return std::make_pair(b.lower, b.upper);
      },
      py::arg("dim"), py::arg("moments"), py::arg("degree"), py::arg("interval") = py::none(),
      "Bounds on tr(rho_-) from moments tr(rho^k), k = 1..len(moments).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        const int code = cli::run(args, out);
        return py::make_tuple(code, out.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit code, JSON report).");
}
