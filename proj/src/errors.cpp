#include "bergman/errors.hpp"

namespace bergman {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisjointOrNested: return "DisjointOrNested";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NearTangent: return "NearTangent";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::OriginSingular: return "OriginSingular";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::BoundaryZero: return "BoundaryZero";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::BranchViolation: return "BranchViolation";
    case ErrorCode::OutOfRegime: return "OutOfRegime";
    case ErrorCode::InsufficientAtlasDepth: return "InsufficientAtlasDepth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace bergman
