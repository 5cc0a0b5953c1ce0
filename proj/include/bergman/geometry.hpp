#pragma once

// Two balls in C^2: the unit ball B1 at the origin and B2 = B(a, r). Their
// boundary spheres meet transversally iff |1 - rho| < r < 1 + rho, and then
// carry exactly two complex tangent points p and q.

#include "bergman/types.hpp"

namespace bergman {

struct BallPair {
  Complex a1;
  Complex a2;
  double r = 1.0;

  C2 center() const { return {a1, a2}; }
  double rho() const { return std::sqrt(std::norm(a1) + std::norm(a2)); }
};

/// Contact invariants of a transversal pair. chi lies in (0, pi) and belongs
/// to p; q carries -chi (and -theta).
struct ContactData {
  BallPair balls;
  double rho = 0.0;
  double chi = 0.0;
  double theta = 0.0;
  C2 p{};
  C2 q{};
};

inline constexpr double kDefaultGeometryEps = 1e-8;

/// Throws Error{Degenerate | DisjointOrNested | NearTangent}.
void validate_transversality(const BallPair& bp, double eps_geom = kDefaultGeometryEps);

/// Validates, then computes rho, chi, theta and the tangent points.
ContactData contact_data(const BallPair& bp, double eps_geom = kDefaultGeometryEps);

struct TangencyResiduals {
  double sphere1 = 0.0;    // max over p, q of ||z|^2 - 1|
  double sphere2 = 0.0;    // max over p, q of ||z - a|^2 - r^2|
  double dependence = 0.0; // max over p, q of |det(z, z - a)|
  double angle_identity = 0.0;  // |1 - rho e^{-i chi} - r e^{i theta}|
};

TangencyResiduals tangency_residuals(const ContactData& cd);

}  // namespace bergman
