#include "bergman/kernel.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <string>

#include "bergman/errors.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {
namespace {

constexpr double kLogCut = 42.0;  // integrand tails below exp(-42) of the peak are dropped

// Finds y with mu_{j+1}(y) = target by bisection (mu is non-decreasing).
double mu_inverse(const WeightProfile& wp, double target) {
  double lo = -1.0;
  double hi = 1.0;
  while (legendre(wp, lo).argmax > target) lo *= 2.0;
  while (legendre(wp, hi).argmax < target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = (lo + hi) / 2;
    (legendre(wp, mid).argmax < target ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

void require_b_in_J(const ModelDomain& md, double b) {
  if (!md.contains_v(b / 2)) {
    throw Error(ErrorCode::InvalidArgument,
                "Im(t2 - conj(tau2))/2 = " + std::to_string(b / 2) + " is outside J");
  }
}

// Breakpoints for an x-integral whose log-modulus g(x) is concave with peak
// near x0: extends until g drops by kLogCut and panels are at most `width`.
template <class G>
std::vector<double> tail_breaks(G&& g, double x0, double width) {
  const double gpk = g(x0);
  double xl = x0 - 1.0;
  for (double d = 1.0; g(xl) > gpk - kLogCut; d *= 1.5) xl -= d;
  double xr = x0 + 1.0;
  for (double d = 1.0; g(xr) > gpk - kLogCut; d *= 1.5) xr += d;
  const int n = std::max(2, static_cast<int>(std::ceil((xr - xl) / width)));
  std::vector<double> br(n + 1);
  for (int i = 0; i <= n; ++i) br[i] = xl + (xr - xl) * i / n;
  return br;
}

// Rough L1 norm from midpoint samples; sets the scale of the absolute tolerance.
template <class Fn>
double l1_estimate(Fn&& f, const std::vector<double>& breaks) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double w = breaks[i + 1] - breaks[i];
    for (int k = 0; k < 4; ++k) acc += std::abs(f(breaks[i] + (k + 0.5) * w / 4)) * w / 4;
  }
  return std::max(acc, 1e-300);
}

std::vector<const AtlasEntry*> entries_by_j(const RootAtlas& atlas) {
  std::vector<const AtlasEntry*> out(atlas.jmax_scanned + 1, nullptr);
  for (const auto& e : atlas.entries) out[e.j] = &e;
  return out;
}

template <class Fn>
void for_each_index(int count, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(bergman_kernel_loop)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ScaledComplex line_integral(const WeightProfile& wp, Complex s, double c, const FOptions& fopt,
                            double tol) {
  const double a = s.real();
  const double b = s.imag();
  require_b_in_J(wp.md, b);
  auto g = [&](double x) { return -b * x / 2 - legendre(wp, -x).value; };
  const double x0 = -mu_inverse(wp, b / 2);
  const double gpk = g(x0);
  const double width = std::min(4.0, 2.0 * kPi / std::max(std::abs(s), 1e-300));
  const auto breaks = tail_breaks(g, x0, width);
  auto f = [&](double x) {
    const ScaledComplex fv = F(wp, Complex(x, -c), fopt);
    const double lg = -b * x / 2 - fv.log_scale - gpk;
    const double ph = (a * x + b * c) / 2;
    return std::polar(std::exp(lg), ph) / fv.mantissa;
  };
  const auto res = quad::integrate_panels(f, breaks, tol * l1_estimate(f, breaks), Complex(0.0), 14);
  return {res.value, a * c / 2 + gpk};
}

double abs_line_integral(const WeightProfile& wp, double b, double h, const FOptions& fopt) {
  require_b_in_J(wp.md, b);
  // Here x enters as F(-x - i h).
  auto g = [&](double x) { return x * b / 2 - legendre(wp, x).value; };
  const double x0 = mu_inverse(wp, b / 2);
  const double gpk = g(x0);
  const auto breaks = tail_breaks(g, x0, 1.0);
  auto f = [&](double x) {
    const ScaledComplex fv = F(wp, Complex(-x, -h), fopt);
    return std::exp(x * b / 2 - fv.log_scale - gpk) / std::abs(fv.mantissa);
  };
  const auto res = quad::integrate_panels(f, breaks, 1e-12 * l1_estimate(f, breaks), 0.0, 14);
  return res.value * std::exp(gpk);
}

Complex ResidueTerm::residue(Complex s) const {
  Complex poly = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) poly = poly * s + coeffs[k];
  return std::exp(kI * s * xi / 2.0) * poly;
}

std::vector<Complex> residue_poly_from_taylor(const std::vector<Complex>& a, int m) {
  if (m < 1 || static_cast<int>(a.size()) < 2 * m) {
    throw Error(ErrorCode::InvalidArgument, "need Taylor coefficients up to order 2m - 1");
  }
  double amax = 0.0;
  for (int k = m; k < 2 * m; ++k) amax = std::max(amax, std::abs(a[k]));
  if (!(std::abs(a[m]) > 1e-12 * amax) || std::abs(a[m]) == 0.0) {
    throw Error(ErrorCode::IllConditioned, "leading Taylor coefficient of the zero is negligible");
  }
  std::vector<Complex> bcoef(m);
  bcoef[0] = 1.0 / a[m];
  for (int n = 1; n < m; ++n) {
    Complex acc = 0.0;
    for (int i = 1; i <= n; ++i) acc += a[m + i] * bcoef[n - i];
    bcoef[n] = -acc / a[m];
  }
  std::vector<Complex> p(m);
  Complex pw = 1.0;
  double fact = 1.0;
  for (int k = 0; k < m; ++k) {
    if (k > 0) {
      pw *= kI / 2.0;
      fact *= k;
    }
    p[k] = bcoef[m - 1 - k] * pw / fact;
  }
  return p;
}

ResidueTerm residue_term(const WeightProfile& wp, const Root& root, const FOptions& fopt) {
  const int m = root.multiplicity;
  const int order = 2 * m - 1;
  std::vector<Complex> taylor(order + 1);
  double log_scale = 0.0;
  if (order <= kMaxDirectDerivative) {
    const FDerivatives d = F_derivatives(wp, root.xi, order, fopt);
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      taylor[k] = d.d[k] / fact;
    }
    log_scale = d.log_scale;
  } else {
    taylor = F_taylor_cauchy(wp, root.xi, order + 1, 0.25, log_scale, fopt, 128);
  }
  ResidueTerm t;
  t.j = wp.j;
  t.xi = root.xi;
  t.multiplicity = m;
  t.coeffs = residue_poly_from_taylor(taylor, m);
  for (auto& c : t.coeffs) c *= std::exp(-log_scale);
  return t;
}

ResidueShiftReport residue_shift_identity_check(const WeightProfile& wp, Complex s, double h,
                                                const RootOptions& ropt) {
  ResidueShiftReport rep;
  const StripScan scan = find_roots(wp, {h, 0.0}, ropt);
  Complex res = 0.0;
  for (const Root& r : scan.roots) res += residue_term(wp, r).residue(s);
  rep.poles = static_cast<int>(scan.roots.size());
  const ScaledComplex lhs = line_integral(wp, s, 0.0);
  const ScaledComplex shifted = line_integral(wp, s, h);
  rep.lhs = lhs.value();
  rep.shifted = shifted.value();
  rep.residue_sum = -2.0 * kPi * kI * res;
  rep.rhs = rep.residue_sum + rep.shifted;
  rep.rel_diff = std::abs(rep.lhs - rep.rhs) / std::abs(rep.lhs);
  return rep;
}

SeriesResult kernel_series_Dprime(const HartogsPoint& t, const HartogsPoint& tau,
                                  const ModelDomain& md, const SeriesConfig& cfg) {
  const Complex s = t.t2 - std::conj(tau.t2);
  const double b = s.imag();
  require_b_in_J(md, b);
  const Complex z = t.t1 * std::conj(tau.t1);
  SeriesResult out;
  out.ratio = std::abs(z) / md.psi(b / 2);
  int J = 0;
  if (z != Complex(0.0)) {
    if (!(out.ratio < 1.0)) {
      throw Error(ErrorCode::NonConvergent,
                  "series ratio " + std::to_string(out.ratio) + " is not below one");
    }
    while (J < cfg.jmax &&
           2.0 * std::log(J + 1.0) + J * std::log(out.ratio) > std::log(cfg.tol * 1e-2)) {
      ++J;
    }
  }

  std::vector<ResidueTerm> residues;
  std::vector<const AtlasEntry*> by_j;
  if (cfg.contour_depth > 0.0) {
    if (cfg.atlas == nullptr || cfg.atlas->h < cfg.contour_depth) {
      throw Error(ErrorCode::InsufficientAtlasDepth, "contour shift needs an atlas at least as deep");
    }
    if (J > cfg.atlas->jmax_scanned && !cfg.atlas->cutoff_certified) {
      throw Error(ErrorCode::InsufficientAtlasDepth, "atlas does not cover the needed frequencies");
    }
    by_j = entries_by_j(*cfg.atlas);
  }

  std::vector<Complex> terms(J + 1);
  for_each_index(J + 1, cfg.exec, [&](int j) {
    const WeightProfile wp{md, j};
    Complex integral;
    if (cfg.contour_depth > 0.0) {
      const ScaledComplex line = line_integral(wp, s, cfg.contour_depth, cfg.fopt);
      Complex res = 0.0;
      if (j < static_cast<int>(by_j.size()) && by_j[j] != nullptr) {
        for (const Root& r : by_j[j]->roots) {
          if (-r.xi.imag() < cfg.contour_depth) res += residue_term(wp, r).residue(s);
        }
      }
      integral = -2.0 * kPi * kI * res + line.value();
    } else {
      integral = line_integral(wp, s, 0.0, cfg.fopt).value();
    }
    const Complex zj = j == 0 ? Complex(1.0) : std::pow(z, j);
    terms[j] = (j + 1.0) / (4.0 * kPi * kPi) * zj * integral;
  });
  for (const Complex& c : terms) out.value += c;
  out.terms = J + 1;
  if (z != Complex(0.0)) {
    out.tail_estimate = std::abs(terms.back()) * out.ratio / (1.0 - out.ratio);
  }
  return out;
}

KernelExpansion build_expansion(const RootAtlas& atlas, std::optional<double> h,
                                const FOptions& fopt) {
  KernelExpansion exp;
  exp.md = atlas.md;
  exp.h = h.value_or(atlas.h);
  if (exp.h > atlas.h) {
    throw Error(ErrorCode::InsufficientAtlasDepth, "expansion depth exceeds the atlas depth");
  }
  for (const auto& e : atlas.entries) {
    const WeightProfile wp{atlas.md, e.j};
    for (const Root& r : e.roots) {
      if (-r.xi.imag() < exp.h) {
        exp.terms.push_back(residue_term(wp, r, fopt));
        exp.jmax_used = std::max(exp.jmax_used, e.j);
      }
    }
  }
  return exp;
}

double calibrate_R(const ModelDomain& md, double b, double h, int jcal) {
  double worst = 0.0;
  for (int j = 0; j <= jcal; ++j) {
    const WeightProfile wp{md, j};
    const double A = abs_line_integral(wp, b, h);
    const double log_ref = std::log(j + 1.0) + wp.eta(b / 2);
    worst = std::max(worst, A * std::exp(-log_ref));
  }
  return 10.0 * worst;
}

double log_tail_bound(const WeightProfile& wp, double delta, double b, double /*h*/, double R,
                      double margin) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta must lie in [0, 1)");
  }
  const double v = b / (2.0 * (1.0 - delta));
  if (!(v - wp.md.v_min > margin && wp.md.v_max - v > margin)) {
    throw Error(ErrorCode::OutOfRegime, "b/(2(1 - delta)) is too close to the ends of J");
  }
  double val = std::log(R) + std::log(wp.n()) + (1.0 - delta) * wp.eta(v);
  if (delta > 0.0) {
    const double H = H_constant(wp.md);
    if (!std::isfinite(H)) {
      throw Error(ErrorCode::OutOfRegime, "H is infinite (0 is not in J); use delta = 0");
    }
    val += delta * wp.n() * H;
  }
  return val;
}

double tail_bound(const WeightProfile& wp, double delta, double b, double h, double R,
                  double margin) {
  return std::exp(log_tail_bound(wp, delta, b, h, R, margin));
}

ValueWithBound kernel_expansion_Dprime(const HartogsPoint& t, const HartogsPoint& tau,
                                       KernelExpansion& exp) {
  const Complex s = t.t2 - std::conj(tau.t2);
  const double a = s.real();
  const double b = s.imag();
  require_b_in_J(exp.md, b);
  const Complex z = t.t1 * std::conj(tau.t1);
  ValueWithBound out;
  for (const auto& term : exp.terms) {
    if (term.j > 0 && z == Complex(0.0)) continue;
    const Complex zj = term.j == 0 ? Complex(1.0) : std::pow(z, term.j);
    out.value += (term.j + 1.0) / (4.0 * kPi * kPi) * zj * (-2.0 * kPi * kI) * term.residue(s);
  }
  if (exp.R == 0.0 || exp.R_b != b) {
    exp.R = calibrate_R(exp.md, b, exp.h);
    exp.R_b = b;
  }
  const double psi = exp.md.psi(b / 2);
  const double q = std::abs(z) / psi;
  if (q >= 1.0) {
    out.error_bound = std::numeric_limits<double>::infinity();
  } else {
    const double sum = (1.0 + q) / std::pow(1.0 - q, 3);
    out.error_bound = exp.R * std::exp(a * exp.h / 2) / (4.0 * kPi * kPi) / psi * sum;
  }
  return out;
}

Complex model_transport(const ModelPoint& w, const ModelPoint& omega) {
  const Complex w32 = w.w2 * std::sqrt(w.w2);
  const Complex o32 = omega.w2 * std::sqrt(omega.w2);
  return 1.0 / (2.0 * w32 * std::conj(o32));
}

namespace {

void check_model_points(const ModelPoint& w, const ModelPoint& omega, const ModelDomain& md) {
  if (w.w2 == Complex(0.0)) {
    throw Error(ErrorCode::OriginSingular, "w2 = 0 is the tangent point itself");
  }
  const double arg = std::arg(w.w2);
  if (arg < md.v_min || arg > md.v_max) {
    throw Error(ErrorCode::BranchViolation, "arg w2 = " + std::to_string(arg) + " lies outside J");
  }
  if (omega.w2 == Complex(0.0) || model_interior_margin(omega, md) < kCompactFloor) {
    throw Error(ErrorCode::OutsideDomain,
                "omega is closer than the compact-subset floor to the model boundary");
  }
}

}  // namespace

ValueWithBound kernel_expansion_eval(const ModelPoint& w, const ModelPoint& omega,
                                     KernelExpansion& exp) {
  check_model_points(w, omega, exp.md);
  const ValueWithBound d = kernel_expansion_Dprime(hartogs_forward(w), hartogs_forward(omega), exp);
  const Complex T = model_transport(w, omega);
  return {T * d.value, std::abs(T) * d.error_bound};
}

SeriesResult kernel_model(const ModelPoint& w, const ModelPoint& omega, const ModelDomain& md,
                          const SeriesConfig& cfg) {
  check_model_points(w, omega, md);
  SeriesResult r = kernel_series_Dprime(hartogs_forward(w), hartogs_forward(omega), md, cfg);
  const Complex T = model_transport(w, omega);
  r.value *= T;
  r.tail_estimate *= std::abs(T);
  return r;
}

OmegaKernel kernel_omega(const C2& z, const C2& zeta, const ContactData& cd,
                         const ProjectiveNormalization& pn, KernelMethod method,
                         const SeriesConfig& cfg, KernelExpansion* exp) {
  const ModelPoint w = map_to_model(z, cd, pn);
  const ModelPoint omega = map_to_model(zeta, cd, pn);
  const Complex dz = jacobian_det(z, cd, pn);
  const Complex dzeta = jacobian_det(zeta, cd, pn);
  const Complex jac = dz * std::conj(dzeta);
  OmegaKernel out;
  if (method == KernelMethod::Series) {
    const SeriesResult r = kernel_model(w, omega, model_domain(cd), cfg);
    out.value = jac * r.value;
    out.error_bound = std::abs(jac) * r.tail_estimate;
  } else {
    if (exp == nullptr) throw Error(ErrorCode::InvalidArgument, "expansion path needs an expansion");
    const ValueWithBound r = kernel_expansion_eval(w, omega, *exp);
    out.value = jac * r.value;
    out.error_bound = std::abs(jac) * r.error_bound;
  }
  return out;
}

LeadingCoefficient leading_coefficient(const KernelExpansion& exp, const ModelPoint& omega) {
  if (exp.terms.empty()) {
    throw Error(ErrorCode::InsufficientAtlasDepth, "expansion has no terms");
  }
  const ResidueTerm* lead = &exp.terms.front();
  for (const auto& t : exp.terms) {
    const double d = -t.xi.imag();
    const double dl = -lead->xi.imag();
    if (d < dl - 1e-12 || (std::abs(d - dl) <= 1e-12 && t.j < lead->j)) lead = &t;
  }
  const int j = lead->j;
  const Complex so = std::sqrt(omega.w2);
  const Complex o32 = omega.w2 * so;
  const Complex lo = std::log(omega.w2);
  Complex C = (j + 1.0) / std::pow(2.0, j) / (4.0 * kPi * kI) * lead->coeffs.back() /
              std::conj(o32) * std::exp(-kI * std::conj(lo) * lead->xi / 2.0);
  if (j > 0) C *= std::pow(std::conj(omega.w1) / std::conj(so), j);
  return {C, j, lead->xi, std::abs(C) < 1e-10};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy convergence_study(KernelExpansion& exp, const RootAtlas& deep_atlas,
                                   double series_depth, const ModelPoint& omega,
                                   const std::vector<double>& us, Exec exec) {
  ConvergenceStudy st;
  st.rows.resize(us.size());
  const HartogsPoint tau = hartogs_forward(omega);
  // Calibrate once outside the parallel loop (b is the same along the ray).
  {
    const Complex s = Complex(0.0, exp.md.v0) - std::conj(tau.t2);
    if (exp.R == 0.0 || exp.R_b != s.imag()) {
      exp.R = calibrate_R(exp.md, s.imag(), exp.h);
      exp.R_b = s.imag();
    }
  }
  SeriesConfig cfg;
  cfg.contour_depth = series_depth;
  cfg.atlas = &deep_atlas;
  cfg.exec = Exec::Serial;
  for_each_index(static_cast<int>(us.size()), exec, [&](int i) {
    const double u = us[i];
    const ModelPoint w{0.0, std::polar(std::exp(u), exp.md.v0)};
    const HartogsPoint t = hartogs_forward(w);
    KernelExpansion local = exp;  // per-thread copy; R is already calibrated
    const SeriesResult ser = kernel_series_Dprime(t, tau, exp.md, cfg);
    const ValueWithBound ex = kernel_expansion_Dprime(t, tau, local);
    const Complex T = model_transport(w, omega);
    const Complex diff = ser.value - ex.value;
    st.rows[i] = {u, std::log(std::abs(T * diff)), std::log(std::abs(diff)),
                  std::log(std::abs(T) * ex.error_bound)};
  });
  std::vector<double> x, ym, yd;
  for (const auto& r : st.rows) {
    x.push_back(r.u);
    ym.push_back(r.log_error_model);
    yd.push_back(r.log_error_Dprime);
  }
  st.slope_model = least_squares_slope(x, ym);
  st.slope_Dprime = least_squares_slope(x, yd);
  return st;
}

}  // namespace bergman
