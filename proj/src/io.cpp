#include "freeconvex/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace freeconvex::io {

namespace {

const Json& field(const Json& j, const char* key) {
  require(j.is_object() && j.contains(key), ErrorKind::InvalidInput,
          std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Index index_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  require(v.is_number_integer() && v.get<long long>() >= 0, ErrorKind::InvalidInput,
          std::string("field \"") + key + "\" must be a nonnegative integer");
  return static_cast<Index>(v.get<long long>());
}

double number(const Json& v) {
  require(v.is_number(), ErrorKind::InvalidInput, "expected a number");
  return v.get<double>();
}

RealMatrix rows_of(const Json& rows, Index n_rows, Index n_cols) {
  require(rows.is_array() && static_cast<Index>(rows.size()) == n_rows, ErrorKind::InvalidInput,
          "matrix has the wrong number of rows");
  RealMatrix m(n_rows, n_cols);
  for (Index i = 0; i < n_rows; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Index>(row.size()) == n_cols, ErrorKind::InvalidInput,
            "matrix row has the wrong length");
    for (Index k = 0; k < n_cols; ++k) m(i, k) = number(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

Json rows_to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::InvalidInput, "cannot open input file " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

Json to_json(const ComplexMatrix& m) {
  require(m.rows() == m.cols(), ErrorKind::InvalidInput, "matrix JSON holds square matrices only");
  Json j;
  j["dim"] = m.rows();
  j["re"] = rows_to_json(m.real());
  if (m.imag().cwiseAbs().maxCoeff() > 0.0) j["im"] = rows_to_json(m.imag());
  return j;
}

Json to_json(const HermitianMatrix& m) { return to_json(m.matrix()); }

ComplexMatrix complex_matrix_from_json(const Json& j) {
  return guarded([&] {
    const Index n = index_field(j, "dim");
    ComplexMatrix m(n, n);
    m.real() = rows_of(field(j, "re"), n, n);
    m.imag() = j.contains("im") ? rows_of(j.at("im"), n, n) : RealMatrix::Zero(n, n);
    require(all_finite(m), ErrorKind::InvalidInput, "matrix has non-finite entries");
    return m;
  });
}

HermitianMatrix hermitian_from_json(const Json& j) {
  const ComplexMatrix m = complex_matrix_from_json(j);
  try {
    return HermitianMatrix(m);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("Hermitian field: ") + e.what());
  }
}

RealMatrix real_matrix_from_json(const Json& j) {
  return guarded([&] {
    if (j.is_array()) {
      const Index rows = static_cast<Index>(j.size());
      require(rows > 0 && j.front().is_array(), ErrorKind::InvalidInput, "expected an array of rows");
      return rows_of(j, rows, static_cast<Index>(j.front().size()));
    }
    const ComplexMatrix m = complex_matrix_from_json(j);
    require(m.imag().cwiseAbs().maxCoeff() == 0.0, ErrorKind::InvalidInput, "expected a real matrix");
    return RealMatrix(m.real());
  });
}

HermitianMatrix parse_matrix_file(const std::string& path) { return hermitian_from_json(load_json(path)); }

Json to_json(const SdpProblem& p) {
  Json j;
  j["blockDims"] = p.block_dims;
  auto blocks = [](const std::vector<HermitianMatrix>& bs) {
    Json arr = Json::array();
    for (const auto& b : bs) arr.push_back(b.dim() == 0 ? Json(nullptr) : to_json(b));
    return arr;
  };
  j["objective"] = blocks(p.objective);
  j["constraints"] = Json::array();
  for (const auto& c : p.constraints)
    j["constraints"].push_back(Json{{"coefficients", blocks(c.coefficients)}, {"rhs", c.rhs}});
  return j;
}

SdpProblem sdp_problem_from_json(const Json& j) {
  return guarded([&] {
    SdpProblem p;
    for (const auto& d : field(j, "blockDims")) {
      require(d.is_number_integer() && d.get<long long>() >= 1, ErrorKind::InvalidInput,
              "block dimensions must be positive integers");
      p.block_dims.push_back(static_cast<Index>(d.get<long long>()));
    }
    auto blocks = [](const Json& arr) {
      std::vector<HermitianMatrix> out;
      require(arr.is_array(), ErrorKind::InvalidInput, "expected an array of blocks");
      for (const auto& b : arr) out.push_back(b.is_null() ? HermitianMatrix() : hermitian_from_json(b));
      return out;
    };
    if (j.contains("objective")) p.objective = blocks(j.at("objective"));
    for (const auto& c : field(j, "constraints"))
      p.constraints.push_back({blocks(field(c, "coefficients")), number(field(c, "rhs"))});
    validate(p);
    return p;
  });
}

Json to_json(const SdpSolution& s) {
  Json j;
  j["status"] = to_string(s.status);
  j["primalObjective"] = s.primal_objective;
  j["dualObjective"] = s.dual_objective;
  j["residuals"] = {{"primal", s.residuals.primal_feas}, {"dual", s.residuals.dual_feas}, {"gap", s.residuals.gap}};
  j["iterations"] = s.iterations;
  j["blocks"] = Json::array();
  for (const auto& b : s.blocks) j["blocks"].push_back(to_json(b));
  j["dualMultipliers"] = std::vector<double>(s.dual_multipliers.data(),
                                             s.dual_multipliers.data() + s.dual_multipliers.size());
  if (s.certificate) {
    const auto& r = s.certificate->ray;
    j["certificate"] = {{"ray", std::vector<double>(r.data(), r.data() + r.size())},
                        {"residual", s.certificate->residual}};
  }
  return j;
}

NonlocalGame game_from_json(const Json& j) {
  return guarded([&] {
    const Index qa = index_field(j, "qa"), qb = index_field(j, "qb");
    const Index aa = index_field(j, "aa"), ab = index_field(j, "ab");
    const Json& w = field(j, "w");
    std::vector<std::uint8_t> win;
    auto sized = [](const Json& v, Index n) {
      require(v.is_array() && static_cast<Index>(v.size()) == n, ErrorKind::InvalidInput,
              "winning table has the wrong shape");
      return true;
    };
    sized(w, qa);
    for (Index a = 0; a < qa; ++a) {
      sized(w[a], qb);
      for (Index b = 0; b < qb; ++b) {
        sized(w[a][b], aa);
        for (Index x = 0; x < aa; ++x) {
          sized(w[a][b][x], ab);
          for (Index y = 0; y < ab; ++y) {
            const double v = number(w[a][b][x][y]);
            require(v == 0.0 || v == 1.0, ErrorKind::InvalidInput, "winning table entries must be 0 or 1");
            win.push_back(static_cast<std::uint8_t>(v));
          }
        }
      }
    }
    if (!j.contains("pi")) return NonlocalGame(qa, qb, aa, ab, std::move(win));
    return NonlocalGame(qa, qb, aa, ab, std::move(win), rows_of(j.at("pi"), qa, qb));
  });
}

Json to_json(const NonlocalGame& g) {
  Json j;
  j["qa"] = g.alice_questions();
  j["qb"] = g.bob_questions();
  j["aa"] = g.alice_answers();
  j["ab"] = g.bob_answers();
  j["pi"] = rows_to_json(g.question_distribution());
  Json w = Json::array();
  for (Index a = 0; a < g.alice_questions(); ++a) {
    Json wa = Json::array();
    for (Index b = 0; b < g.bob_questions(); ++b) {
      Json wb = Json::array();
      for (Index x = 0; x < g.alice_answers(); ++x) {
        Json wx = Json::array();
        for (Index y = 0; y < g.bob_answers(); ++y) wx.push_back(g.wins(a, b, x, y) ? 1 : 0);
        wb.push_back(std::move(wx));
      }
      wa.push_back(std::move(wb));
    }
    w.push_back(std::move(wa));
  }
  j["w"] = std::move(w);
  return j;
}

namespace {

std::vector<ComplexMatrix> block_array(const Json& arr, Index r, Index d) {
  require(arr.is_array() && static_cast<Index>(arr.size()) == r, ErrorKind::InvalidInput,
          "block array must have r rows");
  std::vector<ComplexMatrix> out;
  for (const auto& row : arr) {
    require(row.is_array() && static_cast<Index>(row.size()) == r, ErrorKind::InvalidInput,
            "block array must have r columns");
    for (const auto& m : row) {
      out.push_back(complex_matrix_from_json(m));
      require(out.back().rows() == d, ErrorKind::InvalidInput, "block size differs from the physical dimension");
    }
  }
  return out;
}

}  // namespace

Mpdo mpdo_from_json(const Json& j) {
  return guarded([&] {
    const Index n = index_field(j, "n"), r = index_field(j, "r");
    const Json& d = field(j, "d");
    const Json& tensors = field(j, "tensors");
    require(d.is_array() && static_cast<Index>(d.size()) == n && tensors.is_array() &&
                static_cast<Index>(tensors.size()) == n,
            ErrorKind::InvalidInput, "MPDO needs n physical dimensions and n site tensors");
    std::vector<std::vector<ComplexMatrix>> sites;
    for (Index s = 0; s < n; ++s) sites.push_back(block_array(tensors[s], r, d[s].get<Index>()));
    return Mpdo(r, std::move(sites));
  });
}

Json to_json(const Mpdo& m) {
  Json j;
  j["n"] = m.sites();
  j["r"] = m.bond_dim();
  j["d"] = m.phys_dims();
  j["tensors"] = Json::array();
  for (Index s = 0; s < m.sites(); ++s) {
    Json site = Json::array();
    for (Index i = 0; i < m.bond_dim(); ++i) {
      Json row = Json::array();
      for (Index k = 0; k < m.bond_dim(); ++k) row.push_back(to_json(m.block(s, i, k)));
      site.push_back(std::move(row));
    }
    j["tensors"].push_back(std::move(site));
  }
  return j;
}

TiTensor ti_tensor_from_json(const Json& j) {
  return guarded([&] {
    const Index r = index_field(j, "r"), d = index_field(j, "d");
    return TiTensor(r, block_array(field(j, "blocks"), r, d));
  });
}

std::vector<HermitianMatrix> effects_from_json(const Json& j) {
  return guarded([&] {
    const Json& arr = j.is_array() ? j : field(j, "effects");
    require(arr.is_array() && !arr.empty(), ErrorKind::InvalidInput, "expected a nonempty list of effects");
    std::vector<HermitianMatrix> out;
    for (const auto& m : arr) out.push_back(hermitian_from_json(m));
    return out;
  });
}

QuantumMagicSquare magic_square_from_json(const Json& j) {
  return guarded([&] {
    const Index d = index_field(j, "d");
    const Json& rows = field(j, "entries");
    require(rows.is_array() && static_cast<Index>(rows.size()) == d, ErrorKind::InvalidInput,
            "magic square needs d rows");
    std::vector<HermitianMatrix> entries;
    for (const auto& row : rows) {
      require(row.is_array() && static_cast<Index>(row.size()) == d, ErrorKind::InvalidInput,
              "magic square needs d columns");
      for (const auto& m : row) entries.push_back(hermitian_from_json(m));
    }
    return QuantumMagicSquare(d, std::move(entries));
  });
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  std::size_t width = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows) {
    require(row.size() == width, ErrorKind::InvalidInput, "CSV rows must all have the same length");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (const auto* s = std::get_if<std::string>(&row[c])) out << quote(*s);
      else out << format_double(std::get<double>(row[c]));
    }
    out << "\r\n";
  }
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::InvalidInput, "cannot write " + path);
  write_csv(out, rows);
  require(out.good(), ErrorKind::InvalidInput, "write failed for " + path);
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cell += c;
    }
  }
  if (any) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace freeconvex::io
