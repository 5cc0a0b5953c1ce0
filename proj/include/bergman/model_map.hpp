#pragma once

// Projective normalization of the ball pair, the affine model
//   {|w1|^2 < min(2 Re w2, -2 Re(phi w2))},
// the biholomorphism Psi from the intersection onto it, and the Hartogs map
// t1 = w1 / (sqrt(2) sqrt(w2)), t2 = log w2 onto {|t1|^2 < psi(Im t2)}.

#include <array>

#include "bergman/geometry.hpp"
#include "bergman/types.hpp"

namespace bergman {

using Mat3 = std::array<std::array<Complex, 3>, 3>;

struct ProjectiveNormalization {
  Mat3 A{};             // z = A w in homogeneous coordinates (z3 = w3 = 1 affinely)
  Complex lambda;
  Complex mu;
  Complex a21;
  Complex phi;          // from the defining product
  Complex phi_closed;   // -r e^{i theta}
  // When |a1| is tiny the coordinates are swapped before normalizing; the
  // swap is a unitary map, so kernels transport with a unit Jacobian factor.
  bool swapped = false;
  ContactData working;  // contact data in the (possibly swapped) frame
};

/// The Hartogs model domain for (r, theta). theta = 0 is accepted only for
/// the diagnostic Laplace-transform mode.
struct ModelDomain {
  double r = 1.0;
  double theta = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
  double v0 = 0.0;

  double psi(double v) const;
  double length() const { return v_max - v_min; }
  bool contains_v(double v) const { return v > v_min && v < v_max; }
};

/// Builds J and v0. Throws InvalidArgument unless r > 0 and |theta| < pi;
/// theta = 0 only with allow_theta_zero.
ModelDomain make_model_domain(double r, double theta, bool allow_theta_zero = false);
ModelDomain model_domain(const ContactData& cd);

struct ModelPoint {
  Complex w1;
  Complex w2;
};

struct HartogsPoint {
  Complex t1;
  Complex t2;
};

inline constexpr double kClosureTol = 1e-10;

ProjectiveNormalization build_normalization(const ContactData& cd);

/// Pointwise membership in the intersection (strict) or its closure (with tol).
bool in_omega(const C2& z, const BallPair& bp, double tol = 0.0);

/// Psi. Throws OutsideDomain if z is not in the closure, PoleHit at the
/// (exterior) pole <z - p, a> = 0.
ModelPoint map_to_model(const C2& z, const ContactData& cd, const ProjectiveNormalization& pn);

/// Psi without the closure check; used for difference quotients.
ModelPoint map_to_model_unchecked(const C2& z, const ProjectiveNormalization& pn);

/// Inverse of Psi via the projective matrix.
C2 map_from_model(const ModelPoint& w, const ProjectiveNormalization& pn);

/// det DPsi(z), closed form.
Complex jacobian_det(const C2& z, const ContactData& cd, const ProjectiveNormalization& pn);

/// Defining inequalities of the affine model: values of |w1|^2 - 2 Re w2 and
/// |w1|^2 + 2 Re(phi w2); the point is inside iff both are negative.
std::array<double, 2> model_defining(const ModelPoint& w, Complex phi);
bool in_model(const ModelPoint& w, Complex phi, double tol = 0.0);

/// Distance-like margin of a model point from the model boundary, computed
/// on the Hartogs side: min of psi(v) - |t1|^2 and dist(v, boundary of J).
double model_interior_margin(const ModelPoint& w, const ModelDomain& md);

HartogsPoint hartogs_forward(const ModelPoint& mp);
ModelPoint hartogs_inverse(const HartogsPoint& hp);
bool in_hartogs(const HartogsPoint& hp, const ModelDomain& md, double tol = 0.0);

/// det DPhi(w) = 1 / (sqrt(2) w2^{3/2}).
Complex hartogs_jacobian_det(const ModelPoint& mp);

}  // namespace bergman
