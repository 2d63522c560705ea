#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "freeconvex/conesolve.hpp"
#include "freeconvex/games.hpp"
#include "freeconvex/magic.hpp"
#include "freeconvex/tensornet.hpp"

namespace freeconvex::io {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON file; missing files and syntax errors are InvalidInput.
Json load_json(const std::string& path);

/// {"dim": n, "re": [[...]], "im": [[...]]}, "im" omitted when zero.
Json to_json(const ComplexMatrix& m);
Json to_json(const HermitianMatrix& m);
ComplexMatrix complex_matrix_from_json(const Json& j);
HermitianMatrix hermitian_from_json(const Json& j);
/// Accepts a matrix object without "im" or a bare array of rows.
RealMatrix real_matrix_from_json(const Json& j);

HermitianMatrix parse_matrix_file(const std::string& path);

Json to_json(const SdpProblem& p);
SdpProblem sdp_problem_from_json(const Json& j);
Json to_json(const SdpSolution& s);

/// {"qa","qb","aa","ab","pi"?,"w"} with w[a][b][x][y]; pi defaults to uniform.
NonlocalGame game_from_json(const Json& j);
Json to_json(const NonlocalGame& g);

/// {"n","r","d":[...],"tensors":[site][i][i'] -> matrix}.
Mpdo mpdo_from_json(const Json& j);
Json to_json(const Mpdo& m);
/// {"r","d","blocks":[i][i'] -> matrix}.
TiTensor ti_tensor_from_json(const Json& j);

/// {"effects":[matrix, ...]} or a bare array of matrices.
std::vector<HermitianMatrix> effects_from_json(const Json& j);
/// {"d": n, "entries": [[matrix, ...], ...]}.
QuantumMagicSquare magic_square_from_json(const Json& j);

/// RFC 4180 CSV with 17 significant digits for numbers.
using CsvCell = std::variant<std::string, double>;
using CsvRow = std::vector<CsvCell>;
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
void write_csv(const std::string& path, const std::vector<CsvRow>& rows);
std::vector<std::vector<std::string>> read_csv(std::istream& in);

std::string format_double(double v);

}  // namespace freeconvex::io
