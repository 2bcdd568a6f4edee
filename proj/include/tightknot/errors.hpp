#pragma once

#include <stdexcept>
#include <string>

namespace tightknot {

enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kGeometry,  // infeasible or degenerate configuration
  kConvergence,
  kTopology,
};

// Single exception type for the library; `kind()` lets the CLI map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tightknot
