#include "freeconvex/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "freeconvex/freespec.hpp"
#include "freeconvex/io.hpp"
#include "freeconvex/sepp.hpp"

namespace freeconvex::cli {

namespace {

using io::Json;

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kNumerical = 3 };

struct Config {
  double tol = kDefaultPsdTol;
  std::uint64_t seed = 0;
  std::string out_path;
};

struct Report {
  Json body;
  int code = kOk;
};

Json header(const std::string& command) {
  Json j;
  j["schemaVersion"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::SizeLimit:
    case ErrorKind::PreconditionViolation:
    case ErrorKind::InvalidMap:
    case ErrorKind::InvalidInterval:
      return kUsage;
    case ErrorKind::NumericalDegeneracy:
    case ErrorKind::InternalInconsistency:
    case ErrorKind::Indeterminate:
      return kNumerical;
  }
  return kNumerical;
}

Json error_report(const std::string& kind, const std::string& message) {
  Json j;
  j["schemaVersion"] = kSchemaVersion;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j;
}

Json vector_json(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::pair<Index, Index> parse_dims(const std::string& text) {
  Index d = 0, s = 0;
  char comma = 0;
  std::istringstream in(text);
  require(static_cast<bool>(in >> d >> comma >> s) && comma == ',' && in.peek() == EOF && d >= 1 && s >= 1,
          ErrorKind::InvalidInput, "--dims expects two positive integers d,s");
  return {d, s};
}

// Local dimensions from --dims, else from a "dims" field next to the matrix.
std::pair<Index, Index> state_dims(const Json& j, const std::string& flag, Index total) {
  std::pair<Index, Index> dims;
  if (!flag.empty()) {
    dims = parse_dims(flag);
  } else {
    require(j.contains("dims") && j["dims"].is_array() && j["dims"].size() == 2, ErrorKind::InvalidInput,
            "state needs --dims d,s or a \"dims\" field");
    dims = {j["dims"][0].get<Index>(), j["dims"][1].get<Index>()};
  }
  require(dims.first * dims.second == total, ErrorKind::InvalidInput, "dims do not match the state size");
  return dims;
}

// A state file holds a matrix object, optionally wrapped as {"state": matrix, "dims": [d, s]}.
const Json& state_matrix(const Json& j) { return j.contains("state") ? j.at("state") : j; }

Report sdp_solve(const Config& cfg, const std::string& path) {
  const SdpProblem p = io::sdp_problem_from_json(io::load_json(path));
  SdpOptions opts;
  opts.tol = std::min(opts.tol, std::max(cfg.tol, 1e-12));
  const SdpSolution s = solve(p, opts);
  Report r{header("sdp solve")};
  r.body["solution"] = io::to_json(s);
  r.code = s.status == SdpStatus::Optimal ? kOk : s.status == SdpStatus::Infeasible ? kNegative : kNumerical;
  return r;
}

Report jointmeas(const Config& cfg, const std::string& path, bool bisect) {
  const auto effects = io::effects_from_json(io::load_json(path));
  const JointMeasurability jm = jointly_measurable(effects, cfg.tol);
  Report r{header("freespec jointmeas")};
  r.body["verdict"] = to_string(jm.verdict);
  r.body["solverStatus"] = to_string(jm.solver_status);
  r.body["iterations"] = jm.iterations;
  r.body["marginalResidual"] = jm.marginal_residual;
  if (jm.verdict == Verdict::No) r.body["certificateResidual"] = jm.certificate_residual;
  if (jm.povm) {
    Json joint = Json::array();
    for (const auto& e : jm.povm->effects) joint.push_back(io::to_json(e));
    r.body["jointPovm"] = std::move(joint);
  }
  if (bisect) {
    const NoiseThreshold t = noise_threshold(effects);
    r.body["noiseThreshold"] = {{"lower", t.lower}, {"upper", t.upper}, {"steps", t.steps}};
  }
  r.code = jm.verdict == Verdict::Yes ? kOk : jm.verdict == Verdict::No ? kNegative : kNumerical;
  return r;
}

Report sepp_osr(const Config& cfg, const std::string& path, const std::string& dims_flag) {
  const Json j = io::load_json(path);
  const HermitianMatrix rho = io::hermitian_from_json(state_matrix(j));
  const auto [d, s] = state_dims(j, dims_flag, rho.dim());
  const SchmidtDecomposition sd = operator_schmidt(rho, d, s, std::max(cfg.tol, 1e-12));
  Report r{header("sepp osr")};
  r.body["rank"] = sd.rank;
  r.body["singularValues"] = vector_json(sd.singular_values);
  Json terms = Json::array();
  for (Index k = 0; k < sd.rank; ++k)
    terms.push_back({{"left", io::to_json(sd.left[static_cast<std::size_t>(k)])},
                     {"right", io::to_json(sd.right[static_cast<std::size_t>(k)])}});
  r.body["terms"] = std::move(terms);
  return r;
}

Report sepp_rank2(const Config& cfg, const std::string& path, const std::string& dims_flag) {
  const Json j = io::load_json(path);
  const HermitianMatrix rho = io::hermitian_from_json(state_matrix(j));
  const auto [d, s] = state_dims(j, dims_flag, rho.dim());
  require(is_psd(rho, cfg.tol), ErrorKind::PreconditionViolation, "state is not psd");
  const SchmidtDecomposition sd = operator_schmidt(rho, d, s);
  require(sd.rank <= 2, ErrorKind::PreconditionViolation,
          "operator Schmidt rank is " + std::to_string(sd.rank) + ", expected at most 2");
  std::vector<ProductTerm> terms;
  if (sd.rank == 1) {
    terms = separable_rank2(sd.left[0], sd.right[0], HermitianMatrix::zero(d), HermitianMatrix::zero(s), cfg.tol);
  } else if (sd.rank == 2) {
    terms = separable_rank2(sd.left[0], sd.right[0], sd.left[1], sd.right[1], cfg.tol);
  }
  ComplexMatrix rebuilt = ComplexMatrix::Zero(rho.dim(), rho.dim());
  Report r{header("sepp rank2")};
  Json out = Json::array();
  for (const auto& [a, b] : terms) {
    rebuilt += kron(a.matrix(), b.matrix());
    out.push_back({{"left", io::to_json(a)}, {"right", io::to_json(b)}});
  }
  r.body["operatorSchmidtRank"] = sd.rank;
  r.body["terms"] = std::move(out);
  r.body["reconstructionError"] = (rebuilt - rho.matrix()).norm() / std::max(1.0, rho.norm());
  return r;
}

Report magic_validate(const Config& cfg, const std::string& path) {
  const QuantumMagicSquare m = io::magic_square_from_json(io::load_json(path));
  const MagicValidation v = validate_magic_square(m, cfg.tol);
  Report r{header("magic validate")};
  r.body["valid"] = v.valid;
  r.body["quantumPermutation"] = v.valid && is_quantum_permutation(m);
  Json violations = Json::array();
  for (const auto& e : v.violations)
    violations.push_back({{"kind", to_string(e.kind)}, {"row", e.row}, {"column", e.column}, {"residual", e.residual}});
  r.body["violations"] = std::move(violations);
  r.code = v.valid ? kOk : kNegative;
  return r;
}

Report magic_birkhoff(const Config& cfg, const std::string& path) {
  const RealMatrix m = io::real_matrix_from_json(io::load_json(path));
  const auto terms = birkhoff_decompose(m, std::max(cfg.tol, 1e-9));
  RealMatrix rebuilt = RealMatrix::Zero(m.rows(), m.cols());
  Json out = Json::array();
  for (const auto& t : terms) {
    rebuilt += t.weight * permutation_matrix(t.permutation);
    out.push_back({{"weight", t.weight}, {"permutation", t.permutation}});
  }
  Report r{header("magic birkhoff")};
  r.body["terms"] = std::move(out);
  r.body["reconstructionError"] = (rebuilt - m).norm();
  return r;
}

Report magic_naimark(const Config& cfg, const std::string& path) {
  const Povm p(io::effects_from_json(io::load_json(path)), cfg.tol);
  const NaimarkDilation dil = naimark_dilate(p);
  const NaimarkResiduals res = naimark_residuals(dil, p);
  Report r{header("magic naimark")};
  r.body["dilationDim"] = dil.isometry.rows();
  Json iso;
  iso["rows"] = dil.isometry.rows();
  iso["cols"] = dil.isometry.cols();
  auto rows = [](const RealMatrix& m) {
    Json out = Json::array();
    for (Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
  };
  iso["re"] = rows(dil.isometry.real());
  iso["im"] = rows(dil.isometry.imag());
  r.body["isometry"] = std::move(iso);
  Json pvm = Json::array();
  for (const auto& s : dil.pvm) pvm.push_back(io::to_json(s));
  r.body["pvm"] = std::move(pvm);
  r.body["residuals"] = {{"projection", res.projection}, {"orthogonality", res.orthogonality},
                         {"completeness", res.completeness}, {"isometry", res.isometry},
                         {"marginal", res.marginal}};
  return r;
}

Report games_value(const std::string& path, int npa_level) {
  const NonlocalGame g = io::game_from_json(io::load_json(path));
  const ClassicalValue cv = classical_value(g);
  Report r{header("games value")};
  r.body["classical"] = cv.value;
  r.body["classicalStrategy"] = {{"alice", cv.strategy.alice}, {"bob", cv.strategy.bob}};
  if (npa_level > 0) {
    const NpaCertificate cert = npa_upper_bound(g, npa_level);
    r.body["npaBound"] = cert.objective_bound;
    r.body["certificate"] = {{"level", cert.level},
                             {"momentMatrixSize", cert.moment_matrix.dim()},
                             {"minEigenvalue", min_eigenvalue(cert.moment_matrix)},
                             {"solverStatus", to_string(cert.status)},
                             {"residuals", {{"primal", cert.residuals.primal_feas},
                                            {"dual", cert.residuals.dual_feas},
                                            {"gap", cert.residuals.gap}}}};
  }
  return r;
}

Report tn_moments(const std::string& path, int k) {
  require(k >= 1, ErrorKind::InvalidInput, "--k must be positive");
  const Mpdo m = io::mpdo_from_json(io::load_json(path));
  Report r{header("tn moments")};
  Json out = Json::array();
  for (int order = 1; order <= k; ++order) {
    const Complex v = mpdo_moment(m, order);
    out.push_back({{"k", order}, {"re", v.real()}, {"im", v.imag()}});
  }
  r.body["moments"] = std::move(out);
  return r;
}

Report tn_psd_bounds(const std::string& path, int degree, const std::string& csv_path) {
  require(degree >= 1, ErrorKind::InvalidInput, "--degree must be positive");
  const Mpdo m = io::mpdo_from_json(io::load_json(path));
  const MomentVector mv = mpdo_moment_vector(m, std::max(degree, 2));
  Report r{header("tn psd-bounds")};
  r.body["interval"] = {mv.lower, mv.upper};
  r.body["moments"] = vector_json(mv.moments);
  Json rows = Json::array();
  std::vector<io::CsvRow> csv{{std::string("K"), std::string("lower"), std::string("upper")}};
  for (int k = 1; k <= degree; ++k) {
    const DistanceBounds b = psd_distance_bounds(mv, k);
    rows.push_back({{"K", k}, {"lower", b.lower}, {"upper", b.upper}});
    csv.push_back({static_cast<double>(k), b.lower, b.upper});
  }
  r.body["bounds"] = std::move(rows);
  if (!csv_path.empty()) io::write_csv(csv_path, csv);
  return r;
}

Report tn_tau_scan(const Config& cfg, const std::string& path, int n_max) {
  const TiTensor t = io::ti_tensor_from_json(io::load_json(path));
  const auto entries = tau_psd_scan(t, n_max, cfg.tol);
  Report r{header("tn tau-scan")};
  r.body["scope"] = "bounded: verdicts cover n = 1..nMax only";
  r.body["nMax"] = n_max;
  Json out = Json::array();
  bool negative = false;
  for (const auto& e : entries) {
    Json row{{"n", e.n}, {"verdict", to_string(e.verdict)}, {"method", e.dense ? "dense" : "moments"}};
    if (e.dense) {
      row["minEigenvalue"] = e.min_eigenvalue;
    } else {
      row["degree"] = e.moment_degree;
      row["negativeTraceLower"] = e.negative_lower;
      row["negativeTraceUpper"] = e.negative_upper;
    }
    negative = negative || e.verdict == ScanVerdict::NotPsd;
    out.push_back(std::move(row));
  }
  r.body["entries"] = std::move(out);
  r.code = negative ? kNegative : kOk;
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Positivity, separability and free-convexity toolkit", "freeconvex"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--tol", cfg.tol, "Tolerance override")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for randomized searches");
  app.add_option("--out", cfg.out_path, "Write the report to this file");

  std::function<Report()> action;
  std::string input, dims, csv;
  bool bisect = false;
  int npa_level = 0, k = 4, degree = 10, n_max = 8;

  auto group = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->require_subcommand(1);
    sub->fallthrough();
    return sub;
  };
  auto command = [&](CLI::App* parent, const char* name, const char* help, std::function<Report()> fn) {
    auto* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("input", input, "Input JSON file")->required();
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };

  auto* sdp = group("sdp", "Semidefinite programs");
  command(sdp, "solve", "Solve an SDP", [&] { return sdp_solve(cfg, input); });

  auto* freespec = group("freespec", "Free spectrahedra and joint measurability");
  command(freespec, "jointmeas", "Joint measurability of binary effects", [&] {
    return jointmeas(cfg, input, bisect);
  })->add_flag("--bisect-noise", bisect, "Bracket the critical noise level");

  auto* sepp = group("sepp", "Separability and positivity");
  command(sepp, "rank2", "Separable decomposition of an operator Schmidt rank 2 state",
          [&] { return sepp_rank2(cfg, input, dims); })
      ->add_option("--dims", dims, "Local dimensions d,s");
  command(sepp, "osr", "Operator Schmidt decomposition", [&] { return sepp_osr(cfg, input, dims); })
      ->add_option("--dims", dims, "Local dimensions d,s");

  auto* magic = group("magic", "Quantum magic squares and dilations");
  command(magic, "validate", "Check a quantum magic square", [&] { return magic_validate(cfg, input); });
  command(magic, "birkhoff", "Birkhoff decomposition of a doubly stochastic matrix",
          [&] { return magic_birkhoff(cfg, input); });
  command(magic, "naimark", "Naimark dilation of a POVM", [&] { return magic_naimark(cfg, input); });

  auto* games = group("games", "Non-local games");
  command(games, "value", "Classical value and NPA bound", [&] { return games_value(input, npa_level); })
      ->add_option("--npa-level", npa_level, "NPA level (1-3)")
      ->check(CLI::Range(1, 3));

  auto* tn = group("tn", "Tensor networks");
  command(tn, "moments", "Moments tr(rho^k) of an MPDO", [&] { return tn_moments(input, k); })
      ->add_option("--k", k, "Highest moment order");
  auto* bounds = command(tn, "psd-bounds", "Bounds on the negative-part trace",
                         [&] { return tn_psd_bounds(input, degree, csv); });
  bounds->add_option("--degree", degree, "Highest polynomial degree");
  bounds->add_option("--csv", csv, "Also write (K, lower, upper) rows to this CSV file");
  command(tn, "tau-scan", "Psd verdicts for tau_n, n <= nmax", [&] { return tn_tau_scan(cfg, input, n_max); })
      ->add_option("--nmax", n_max, "Largest ring size")
      ->check(CLI::PositiveNumber);

  Json report;
  int code = kOk;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    Report r = action();
    report = std::move(r.body);
    code = r.code;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report = error_report("usage", e.what());
    code = kUsage;
  } catch (const Error& e) {
    report = error_report(to_string(e.kind()), e.what());
    code = exit_code(e.kind());
  } catch (const std::exception& e) {
    report = error_report("internal", e.what());
    code = kNumerical;
  }

  const std::string text = report.dump(2) + "\n";
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(cfg.out_path, std::ios::binary);
    if (!file || !(file << text)) {
      out << error_report("invalid-input", "cannot write " + cfg.out_path).dump(2) << "\n";
      return kUsage;
    }
  }
  return code;
}

}  // namespace freeconvex::cli
