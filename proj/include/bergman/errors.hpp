#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bergman {

enum class ErrorCode {
  DisjointOrNested,
  Degenerate,
  NearTangent,
  OutsideDomain,
  PoleHit,
  OriginSingular,
  QuadratureFailure,
  BoundaryZero,
  NonConvergent,
  IllConditioned,
  BranchViolation,
  OutOfRegime,
  InsufficientAtlasDepth,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported through this type; `code()` carries the
/// error name used by the CLI and in diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bergman
