#include "bergman/geometry.hpp"

#include <algorithm>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {

void validate_transversality(const BallPair& bp, double eps_geom) {
  if (!(bp.r > 0.0) || !std::isfinite(bp.r)) {
    throw Error(ErrorCode::InvalidArgument, "radius must be positive, got " + std::to_string(bp.r));
  }
  const double rho = bp.rho();
  if (!(rho > 0.0)) {
    throw Error(ErrorCode::Degenerate, "ball centers coincide (rho = 0)");
  }
  const double lower = std::abs(1.0 - rho);
  const double upper = 1.0 + rho;
  if (!(lower < bp.r && bp.r < upper)) {
    throw Error(ErrorCode::DisjointOrNested,
                "need |1 - rho| < r < 1 + rho, got rho = " + std::to_string(rho) +
                    ", r = " + std::to_string(bp.r));
  }
  const double margin = std::min(bp.r - lower, upper - bp.r) / upper;
  if (margin < eps_geom) {
    throw Error(ErrorCode::NearTangent,
                "relative transversality margin " + std::to_string(margin) + " below " +
                    std::to_string(eps_geom));
  }
}

ContactData contact_data(const BallPair& bp, double eps_geom) {
  validate_transversality(bp, eps_geom);
  ContactData cd;
  cd.balls = bp;
  cd.rho = bp.rho();
  const double rho = cd.rho;
  const double r = bp.r;
  const double cos_chi = std::clamp((1.0 + rho * rho - r * r) / (2.0 * rho), -1.0, 1.0);
  // sin chi from the triangle area (Heron) keeps full relative accuracy when
  // chi is close to 0 or pi.
  const double s = 0.5 * (1.0 + rho + r);
  const double area = std::sqrt(std::max(0.0, s * (s - 1.0) * (s - rho) * (s - r)));
  const double sin_chi = 2.0 * area / rho;
  cd.chi = std::atan2(sin_chi, cos_chi);
  cd.theta = std::atan2(rho * sin_chi, 1.0 - rho * cos_chi);
  const C2 unit_a = Complex(1.0 / rho) * bp.center();
  cd.p = std::polar(1.0, cd.chi) * unit_a;
  cd.q = std::polar(1.0, -cd.chi) * unit_a;
  return cd;
}

TangencyResiduals tangency_residuals(const ContactData& cd) {
  TangencyResiduals res;
  const C2 a = cd.balls.center();
  const double r2 = cd.balls.r * cd.balls.r;
  for (const C2& z : {cd.p, cd.q}) {
    const C2 d = z - a;
    res.sphere1 = std::max(res.sphere1, std::abs(norm2(z) - 1.0));
    res.sphere2 = std::max(res.sphere2, std::abs(norm2(d) - r2));
    res.dependence = std::max(res.dependence, std::abs(z[0] * d[1] - z[1] * d[0]));
  }
  res.angle_identity = std::abs(1.0 - cd.rho * std::polar(1.0, -cd.chi) -
                                cd.balls.r * std::polar(1.0, cd.theta));
  return res;
}

}  // namespace bergman
