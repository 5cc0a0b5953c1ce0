#pragma once

// Bergman kernel of the Hartogs model by its Fourier series in t1, the
// residue-shifted form of each frequency's xi-integral, the finite residue
// expansion, transport to the affine model and to the ball intersection, and
// tail bounds for the shifted integrals.

#include <optional>
#include <vector>

#include "bergman/exec.hpp"
#include "bergman/laplace.hpp"
#include "bergman/model_map.hpp"
#include "bergman/roots.hpp"

namespace bergman {

/// int_R exp(i s (x - i c)/2) / F_{j+1}(x - i c) dx, returned scaled.
/// Requires Im(s)/2 in J.
ScaledComplex line_integral(const WeightProfile& wp, Complex s, double c,
                            const FOptions& fopt = {1e-13, Precision::Double, 30},
                            double tol = 1e-13);

/// int_R exp(x b/2) / |F_{j+1}(-x - i h)| dx; the quantity bounded by the
/// tail estimate.
double abs_line_integral(const WeightProfile& wp, double b, double h,
                         const FOptions& fopt = {1e-13, Precision::Double, 30});

// --- residues ----------------------------------------------------------------

/// Residue of exp(i s xi/2) / F at a root: exp(i s xi0/2) * sum_k coeffs[k] s^k.
struct ResidueTerm {
  int j = 0;
  Complex xi;
  int multiplicity = 1;
  std::vector<Complex> coeffs;  // degree multiplicity - 1

  Complex residue(Complex s) const;
};

/// Laurent inversion of a Taylor series with a zero of order m at the center:
/// returns the residue polynomial coefficients of exp(i s z/2) / f.
std::vector<Complex> residue_poly_from_taylor(const std::vector<Complex>& taylor, int m);

ResidueTerm residue_term(const WeightProfile& wp, const Root& root,
                         const FOptions& fopt = {1e-15, Precision::Extended, 30});

struct ResidueShiftReport {
  Complex lhs;            // line integral over R
  Complex residue_sum;    // -2 pi i sum of residues in -h < Im xi < 0
  Complex shifted;        // line integral over R - i h
  Complex rhs;
  double rel_diff = 0.0;
  int poles = 0;
};

/// Compares both sides of the contour shift for one frequency.
ResidueShiftReport residue_shift_identity_check(const WeightProfile& wp, Complex s, double h,
                                                const RootOptions& ropt = {});

// --- series ------------------------------------------------------------------

struct SeriesConfig {
  int jmax = 400;
  double tol = 1e-12;           // relative truncation target for the j-sum
  double contour_depth = 0.0;   // > 0: shift every xi-integral to R - i depth
  const RootAtlas* atlas = nullptr;  // required when contour_depth > 0
  FOptions fopt{1e-13, Precision::Double, 30};
  Exec exec = Exec::Parallel;
};

struct SeriesResult {
  Complex value;
  double tail_estimate = 0.0;
  int terms = 0;
  double ratio = 0.0;  // |t1 conj(tau1)| / psi(b/2)
};

/// K_{D'}(t, tau) by the Fourier series. Throws NonConvergent when the ratio
/// of the j-sum is not below one.
SeriesResult kernel_series_Dprime(const HartogsPoint& t, const HartogsPoint& tau,
                                  const ModelDomain& md, const SeriesConfig& cfg = {});

// --- expansion ---------------------------------------------------------------

struct KernelExpansion {
  ModelDomain md;
  double h = 0.0;
  std::vector<ResidueTerm> terms;  // sorted by j, then depth
  int jmax_used = -1;
  double R = 0.0;  // calibrated tail constant (0 = not calibrated)
  double R_b = 0.0;  // b at which R was calibrated
};

/// Residue terms for all roots of the atlas shallower than h (h <= atlas.h).
KernelExpansion build_expansion(const RootAtlas& atlas, std::optional<double> h = std::nullopt,
                                const FOptions& fopt = {1e-15, Precision::Extended, 30});

/// Calibrates R for the given b: ten times the largest observed ratio of the
/// absolute shifted integral to (j+1) exp(eta_{j+1}(b/2)) over j = 0..jcal.
double calibrate_R(const ModelDomain& md, double b, double h, int jcal = 5);

/// R (j+1) exp((1-delta) eta_{j+1}(b/(2(1-delta))) + delta (j+1) H), as a log.
/// delta = 0 is allowed (the delta H term is then dropped). Throws OutOfRegime
/// if b/(2(1-delta)) is within `margin` of the ends of J, or if delta > 0 and H
/// is infinite.
double log_tail_bound(const WeightProfile& wp, double delta, double b, double h, double R,
                      double margin = 1e-3);
double tail_bound(const WeightProfile& wp, double delta, double b, double h, double R,
                  double margin = 1e-3);

struct ValueWithBound {
  Complex value;
  double error_bound = 0.0;
};

/// Residue expansion of K_{D'}; the bound covers the omitted shifted integrals.
ValueWithBound kernel_expansion_Dprime(const HartogsPoint& t, const HartogsPoint& tau,
                                       KernelExpansion& exp);

/// Residue expansion in the affine model, with error bound.
ValueWithBound kernel_expansion_eval(const ModelPoint& w, const ModelPoint& omega,
                                     KernelExpansion& exp);

inline constexpr double kCompactFloor = 1e-3;

/// Transport factor 1 / (2 w2^{3/2} conj(omega2^{3/2})).
Complex model_transport(const ModelPoint& w, const ModelPoint& omega);

/// K of the affine model through the series. Throws BranchViolation if
/// arg w2 is outside J and OutsideDomain if omega is closer than the compact
/// floor to the boundary.
SeriesResult kernel_model(const ModelPoint& w, const ModelPoint& omega, const ModelDomain& md,
                          const SeriesConfig& cfg = {});

enum class KernelMethod { Series, Expansion };

struct OmegaKernel {
  Complex value;
  double error_bound = 0.0;  // tail estimate (series) or expansion bound
};

/// K_Omega(z, zeta) = det DPsi(z) K_model(Psi z, Psi zeta) conj(det DPsi(zeta)).
OmegaKernel kernel_omega(const C2& z, const C2& zeta, const ContactData& cd,
                         const ProjectiveNormalization& pn, KernelMethod method,
                         const SeriesConfig& cfg = {}, KernelExpansion* exp = nullptr);

/// Coefficient of the shallowest expansion term at fixed omega (the leading
/// coefficient in w); |C| < 1e-10 marks omega as exceptional.
struct LeadingCoefficient {
  Complex C;
  int j = 0;
  Complex xi;
  bool exceptional = false;
};
LeadingCoefficient leading_coefficient(const KernelExpansion& exp, const ModelPoint& omega);

// --- convergence study ---------------------------------------------------------

struct ConvergenceRow {
  double u = 0.0;
  double log_error_model = 0.0;   // log |series - expansion| in the affine model
  double log_error_Dprime = 0.0;  // same difference before transport
  double log_bound = 0.0;         // log of the expansion error bound (model)
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double slope_model = 0.0;
  double slope_Dprime = 0.0;
};

/// Along w2 = e^u e^{i v0}, w1 = 0, compares the series (evaluated with its
/// xi-integrals shifted to `series_depth`, which must be admissible) against
/// the expansion of depth exp.h.
ConvergenceStudy convergence_study(KernelExpansion& exp, const RootAtlas& deep_atlas,
                                   double series_depth, const ModelPoint& omega,
                                   const std::vector<double>& us, Exec exec = Exec::Parallel);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bergman
