#pragma once

#include <stdexcept>
#include <string>

namespace freeconvex {

enum class ErrorKind {
  InvalidInput,
  SizeLimit,
  PreconditionViolation,
  InvalidMap,
  InvalidInterval,
  NumericalDegeneracy,
  InternalInconsistency,
  Indeterminate,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace freeconvex
