#pragma once

// Fourier-Laplace transforms F_{j+1}(xi) = int_J e^{-v xi} psi(v)^{j+1} dv of
// the model profile, their xi-derivatives, closed forms for theta = 0 and for
// r = 1 (j = 0), and the Legendre envelope of eta_{j+1} = -(j+1) log psi.
//
// Values are returned scaled: F = mantissa * exp(log_scale) with
// log_scale = eta~_{j+1}(-Re xi), the natural size of F on vertical lines.

#include <array>
#include <utility>
#include <vector>

#include "bergman/exec.hpp"
#include "bergman/model_map.hpp"
#include "bergman/types.hpp"

namespace bergman {

struct WeightProfile {
  ModelDomain md;
  int j = 0;

  int n() const { return j + 1; }  // exponent of psi
  /// eta_{j+1}(v); +inf outside J.
  double eta(double v) const;
  /// eta''_{j+1}(v) away from the kink.
  double eta_second(double v) const;
};

/// One analytic piece of the profile: psi(v) = c cos(v + s) on (lo, hi).
struct ProfilePiece {
  double lo;
  double hi;
  double c;
  double s;
};

std::vector<ProfilePiece> profile_pieces(const ModelDomain& md);

enum class Precision { Double, Extended };

struct FOptions {
  double tol = 1e-14;  // absolute, relative to the scale exp(log_scale)
  Precision precision = Precision::Extended;
  int max_depth = 30;
};

inline constexpr int kMaxDirectDerivative = 8;

/// F and its first `order` derivatives F^{(m)} = int (-v)^m e^{-v xi} psi^{j+1},
/// sharing one scale.
struct FDerivatives {
  std::array<Complex, kMaxDirectDerivative + 1> d{};
  double log_scale = 0.0;
  int order = 0;
  double error = 0.0;  // estimated absolute error, in units of the scale

  ScaledComplex value(int m) const { return {d[m], log_scale}; }
};

ScaledComplex F(const WeightProfile& wp, Complex xi, const FOptions& opt = {});

/// Throws QuadratureFailure when the tolerance is not met.
FDerivatives F_derivatives(const WeightProfile& wp, Complex xi, int order,
                           const FOptions& opt = {});

/// Single derivative. Orders above kMaxDirectDerivative use a Cauchy integral
/// on a circle of radius `cauchy_radius`.
ScaledComplex F_derivative(const WeightProfile& wp, Complex xi, int m, const FOptions& opt = {},
                           double cauchy_radius = 0.25);

/// Taylor coefficients F^{(n)}(xi0)/n!, n = 0..count-1, by the trapezoid rule
/// on a circle (spectrally accurate for entire functions), all on one scale.
std::vector<Complex> F_taylor_cauchy(const WeightProfile& wp, Complex xi0, int count,
                                     double radius, double& log_scale, const FOptions& opt = {},
                                     int points = 64);

/// Evaluates F on many points. Result i is F(xis[i]).
std::vector<ScaledComplex> F_many(const WeightProfile& wp, const std::vector<Complex>& xis,
                                  const FOptions& opt = {}, Exec exec = Exec::Parallel);

/// theta = 0 closed form (cosh / sinh over the odd / even product), scaled
/// by min(1, r)^{j+1}. Removable points are evaluated by a circle mean.
ScaledComplex F_closed_theta0(int j, Complex xi, double r = 1.0);

/// r = 1, j = 0 closed form. Removable points at +-i by a circle mean.
ScaledComplex F1_closed_r1(double theta, Complex xi);

// --- Legendre envelope -----------------------------------------------------

struct LegendreValue {
  double value = 0.0;   // eta~_{j+1}(x)
  double argmax = 0.0;  // mu_{j+1}(x)
  int branch = 0;       // 0 left, 1 plateau (argmax = v0), 2 right
};

/// Closed-form Legendre transform max_v (x v - eta_{j+1}(v)) and its argmax.
LegendreValue legendre(const WeightProfile& wp, double x);

/// The interval of x on which mu_{j+1}(x) = v0.
std::pair<double, double> plateau(const WeightProfile& wp);

struct LegendreEnvelope {
  WeightProfile profile;
  double value(double x) const { return legendre(profile, x).value; }
  double argmax(double x) const { return legendre(profile, x).argmax; }
};

/// Brute-force max of x v - eta(v) over a uniform grid on J that also contains
/// v0; used as an independent check of `legendre`.
LegendreValue legendre_grid(const WeightProfile& wp, double x, int points);

/// H = 1 - inf_x eta~_1(x) = 1 - log psi(0) when 0 is in J, +inf otherwise.
double H_constant(const ModelDomain& md);

struct LowerBoundReport {
  bool passed = false;
  bool plateau = false;
  double log_abs_F = 0.0;
  double log_bound = 0.0;
};

/// Diagnostic lower bound for |F_{j+1}(-x - i h)| relative to its envelope.
LowerBoundReport lower_bound_check(const WeightProfile& wp, double x, double h, double c = 1e-3,
                                   const FOptions& opt = {});

}  // namespace bergman
