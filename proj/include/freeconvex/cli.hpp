#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freeconvex::cli {

inline constexpr int kSchemaVersion = 1;

/// Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage or
/// input error, 3 numerical failure. `args` excludes the program name. The
/// report is one JSON document, written to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace freeconvex::cli
