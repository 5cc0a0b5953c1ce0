#include "bergman/model_map.hpp"

#include <algorithm>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {
namespace {

constexpr double kSwapThreshold = 1e-8;

C2 swap(const C2& z) { return {z[1], z[0]}; }

struct PsiParts {
  Complex A;  // <z - q, a>
  Complex B;  // <z - q, Ta>
  Complex D;  // <z - p, a> = A - 2 i r sin(theta)
};

PsiParts psi_parts(const C2& z, const ContactData& cd) {
  const C2 a = cd.balls.center();
  const C2 ta{std::conj(a[1]), -std::conj(a[0])};
  const C2 d = z - cd.q;
  PsiParts parts;
  parts.A = inner(d, a);
  parts.B = inner(d, ta);
  parts.D = parts.A - 2.0 * kI * cd.balls.r * std::sin(cd.theta);
  return parts;
}

// Coefficients of w1 = c1 B / D and w2 = c2 A / D.
std::pair<Complex, Complex> psi_coeffs(const ProjectiveNormalization& pn) {
  const ContactData& cd = pn.working;
  const Complex a1 = cd.balls.a1;
  const double s = cd.rho * cd.rho / std::norm(a1);
  const Complex c1 =
      2.0 * kI * cd.balls.r * pn.mu * std::sin(cd.theta) / (a1 * pn.a21 * s);
  const Complex c2 = -pn.mu / pn.lambda;
  return {c1, c2};
}

void check_pole(const PsiParts& parts, const ContactData& cd) {
  if (std::abs(parts.D) <= 1e-14 * cd.rho * cd.rho) {
    throw Error(ErrorCode::PoleHit, "<z - p, a> vanishes; z is at the pole of Psi");
  }
}

}  // namespace

double ModelDomain::psi(double v) const {
  if (!contains_v(v)) return 0.0;
  if (theta == 0.0) return std::min(1.0, r) * std::cos(v);
  return std::min(std::cos(v), r * std::cos(v + theta));
}

ModelDomain make_model_domain(double r, double theta, bool allow_theta_zero) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidArgument, "model radius must be positive");
  }
  if (!(std::abs(theta) < kPi)) {
    throw Error(ErrorCode::InvalidArgument, "theta must lie in (-pi, pi)");
  }
  if (theta == 0.0 && !allow_theta_zero) {
    throw Error(ErrorCode::InvalidArgument, "theta = 0 is only allowed in diagnostic mode");
  }
  ModelDomain md;
  md.r = r;
  md.theta = theta;
  if (theta > 0.0) {
    md.v_min = -kPi / 2;
    md.v_max = kPi / 2 - theta;
  } else if (theta < 0.0) {
    md.v_min = -kPi / 2 - theta;
    md.v_max = kPi / 2;
  } else {
    md.v_min = -kPi / 2;
    md.v_max = kPi / 2;
  }
  md.v0 = theta == 0.0 ? 0.0 : std::atan((r * std::cos(theta) - 1.0) / (r * std::sin(theta)));
  return md;
}

ModelDomain model_domain(const ContactData& cd) {
  return make_model_domain(cd.balls.r, cd.theta);
}

ProjectiveNormalization build_normalization(const ContactData& cd) {
  ProjectiveNormalization pn;
  pn.working = cd;
  if (std::abs(cd.balls.a1) < kSwapThreshold * cd.rho) {
    pn.swapped = true;
    pn.working.balls.a1 = cd.balls.a2;
    pn.working.balls.a2 = cd.balls.a1;
    pn.working.p = swap(cd.p);
    pn.working.q = swap(cd.q);
  }
  const ContactData& w = pn.working;
  const double chi = w.chi;
  const Complex a1 = w.balls.a1;
  const Complex a2 = w.balls.a2;
  const Complex ratio = a2 / a1;
  const Complex p1 = w.p[0];
  const Complex q1 = w.q[0];

  pn.lambda = std::polar(1.0, -chi / 2) / (2.0 * kI * std::sin(chi / 2));
  pn.mu = -std::polar(1.0, chi / 2) / (2.0 * std::cos(chi / 2));
  pn.a21 = a1 / w.rho;

  pn.A = {{{-std::conj(ratio) * pn.a21, pn.lambda * p1, pn.mu * q1},
           {pn.a21, pn.lambda * ratio * p1, pn.mu * ratio * q1},
           {0.0, pn.lambda, pn.mu}}};

  const double r = w.balls.r;
  pn.phi = pn.lambda * std::conj(pn.mu) *
           (w.rho * w.rho * (p1 / a1 - 1.0) * std::conj(q1 / a1 - 1.0) - r * r);
  pn.phi_closed = -r * std::polar(1.0, w.theta);
  return pn;
}

bool in_omega(const C2& z, const BallPair& bp, double tol) {
  const double f1 = norm2(z) - 1.0;
  const double f2 = norm2(z - bp.center()) - bp.r * bp.r;
  if (tol == 0.0) return f1 < 0.0 && f2 < 0.0;
  return f1 <= tol && f2 <= tol;
}

ModelPoint map_to_model_unchecked(const C2& z, const ProjectiveNormalization& pn) {
  const C2 zw = pn.swapped ? swap(z) : z;
  const PsiParts parts = psi_parts(zw, pn.working);
  check_pole(parts, pn.working);
  const auto [c1, c2] = psi_coeffs(pn);
  return {c1 * parts.B / parts.D, c2 * parts.A / parts.D};
}

ModelPoint map_to_model(const C2& z, const ContactData& cd, const ProjectiveNormalization& pn) {
  if (!in_omega(z, cd.balls, kClosureTol)) {
    throw Error(ErrorCode::OutsideDomain, "point is outside the closure of the intersection");
  }
  return map_to_model_unchecked(z, pn);
}

C2 map_from_model(const ModelPoint& w, const ProjectiveNormalization& pn) {
  const std::array<Complex, 3> wh{w.w1, w.w2, 1.0};
  std::array<Complex, 3> zh{};
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) zh[i] += pn.A[i][k] * wh[k];
  }
  if (std::abs(zh[2]) == 0.0) {
    throw Error(ErrorCode::PoleHit, "model point maps to the hyperplane at infinity");
  }
  const C2 z{zh[0] / zh[2], zh[1] / zh[2]};
  return pn.swapped ? swap(z) : z;
}

Complex jacobian_det(const C2& z, const ContactData& /*cd*/, const ProjectiveNormalization& pn) {
  const ContactData& w = pn.working;
  const C2 zw = pn.swapped ? swap(z) : z;
  const PsiParts parts = psi_parts(zw, w);
  check_pole(parts, w);
  const auto [c1, c2] = psi_coeffs(pn);
  const Complex k = -2.0 * kI * w.balls.r * std::sin(w.theta);
  const Complex det = c1 * c2 * k * (w.rho * w.rho) / (parts.D * parts.D * parts.D);
  return pn.swapped ? -det : det;
}

std::array<double, 2> model_defining(const ModelPoint& w, Complex phi) {
  const double n1 = std::norm(w.w1);
  return {n1 - 2.0 * w.w2.real(), n1 + 2.0 * (phi * w.w2).real()};
}

bool in_model(const ModelPoint& w, Complex phi, double tol) {
  const auto f = model_defining(w, phi);
  if (tol == 0.0) return f[0] < 0.0 && f[1] < 0.0;
  return f[0] <= tol && f[1] <= tol;
}

double model_interior_margin(const ModelPoint& w, const ModelDomain& md) {
  if (w.w2 == Complex(0.0)) return 0.0;
  const HartogsPoint hp = hartogs_forward(w);
  const double v = hp.t2.imag();
  return std::min({md.psi(v) - std::norm(hp.t1), v - md.v_min, md.v_max - v});
}

HartogsPoint hartogs_forward(const ModelPoint& mp) {
  if (mp.w2 == Complex(0.0)) {
    throw Error(ErrorCode::OriginSingular, "w2 = 0 has no image under the Hartogs map");
  }
  return {mp.w1 / (std::sqrt(2.0) * std::sqrt(mp.w2)), std::log(mp.w2)};
}

ModelPoint hartogs_inverse(const HartogsPoint& hp) {
  return {std::sqrt(2.0) * std::exp(hp.t2 / 2.0) * hp.t1, std::exp(hp.t2)};
}

bool in_hartogs(const HartogsPoint& hp, const ModelDomain& md, double tol) {
  const double v = hp.t2.imag();
  if (tol == 0.0) return md.contains_v(v) && std::norm(hp.t1) < md.psi(v);
  if (v < md.v_min - tol || v > md.v_max + tol) return false;
  return std::norm(hp.t1) <= md.psi(v) + tol;
}

Complex hartogs_jacobian_det(const ModelPoint& mp) {
  return 1.0 / (std::sqrt(2.0) * mp.w2 * std::sqrt(mp.w2));
}

}  // namespace bergman
