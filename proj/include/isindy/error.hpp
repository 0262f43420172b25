#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isindy {

enum class ErrorCode {
  // input validation
  NonUniformGrid,
  NonFinite,
  TooShort,
  BadRange,
  TooFewSegments,
  OutOfDomain,
  DimensionMismatch,
  ParseError,
  ConfigError,
  // numerics
  SingularSystem,
  RankDeficient,
  Underdetermined,
  EmptySupport,
  NoConvergence,
  BlowUp,
};

std::string_view to_string(ErrorCode code);

/// True for errors caused by the caller's data or configuration rather than
/// by a numerical failure inside the pipeline.
bool is_input_error(ErrorCode code);

/// Every failure raised by the library. `module()` names the pipeline stage
/// that raised it (basis, smoothing, solver, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string detail_;
};

}  // namespace isindy
