#include "bergman/laplace.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <string>

#include "bergman/errors.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {
namespace {

constexpr int kVec = kMaxDirectDerivative + 1;

// Breakpoints on one piece: geometric grading around the peak of the
// integrand modulus, refined so that each panel sees a bounded number of
// oscillations, with panels below the tolerance dropped.
std::vector<double> piece_breaks(const ProfilePiece& pc, int n, double xr, double y, double E,
                                 int order, double tol) {
  const double width = pc.hi - pc.lo;
  double vstar = -pc.s + std::atan(xr / n);
  vstar = std::clamp(vstar, pc.lo, pc.hi);
  double sigma = std::cos(vstar + pc.s) / std::sqrt(static_cast<double>(n));
  sigma = std::clamp(sigma, width * 1e-6, width);

  std::vector<double> right{vstar};
  for (double w = sigma, b = vstar; b < pc.hi; w *= 2.0) {
    b = std::min(b + w, pc.hi);
    right.push_back(b);
  }
  std::vector<double> left{vstar};
  for (double w = sigma, b = vstar; b > pc.lo; w *= 2.0) {
    b = std::max(b - w, pc.lo);
    left.push_back(b);
  }

  const double wmax = y != 0.0 ? std::min(0.5, 8.0 / std::abs(y)) : 0.5;
  auto g = [&](double v) {
    const double cv = std::cos(v + pc.s);
    if (!(cv > 0.0)) return -std::numeric_limits<double>::infinity();
    return xr * v + n * std::log(pc.c * cv) - E;
  };
  const double log_cut = std::log(tol) - std::log(1e3);

  // Walks outward from the peak; stops at the first negligible panel since
  // the modulus decreases monotonically away from the peak.
  auto build = [&](const std::vector<double>& side) {
    std::vector<double> out{side.front()};
    for (std::size_t i = 1; i < side.size(); ++i) {
      const double a = side[i - 1];
      const double b = side[i];
      const double len = std::abs(b - a);
      const double vm = std::max({1.0, std::abs(a), std::abs(b)});
      const double bound = g(a) + std::log(len) + order * std::log(vm);
      if (bound < log_cut) break;
      const int pieces = std::max(1, static_cast<int>(std::ceil(len / wmax)));
      for (int k = 1; k <= pieces; ++k) out.push_back(a + (b - a) * k / pieces);
    }
    return out;
  };
  std::vector<double> r = build(right);
  std::vector<double> l = build(left);
  std::vector<double> breaks(l.rbegin(), l.rend());
  breaks.insert(breaks.end(), r.begin() + 1, r.end());
  return breaks;
}

template <class Real>
FDerivatives integrate_F(const WeightProfile& wp, Complex xi, int order, const FOptions& opt) {
  using V = quad::CVec<Real, kVec>;
  const int n = wp.n();
  const double xr = -xi.real();
  const double y = xi.imag();
  const double E = legendre(wp, xr).value;
  const auto pieces = profile_pieces(wp.md);

  V zero;
  zero.size = static_cast<std::size_t>(order + 1);
  FDerivatives out;
  out.order = order;
  out.log_scale = E;
  V total = zero;
  bool converged = true;
  const double tol = opt.tol / static_cast<double>(pieces.size());
  for (const auto& pc : pieces) {
    const Real s = pc.s;
    const Real c = pc.c;
    const Real xrr = xr;
    const Real yr = y;
    const Real Er = E;
    auto f = [&](Real v) {
      V val = zero;
      const Real cv = std::cos(v + s);
      if (!(cv > 0)) return val;
      const Real mag = std::exp(xrr * v + static_cast<Real>(n) * std::log(c * cv) - Er);
      const Real ph = -v * yr;
      std::complex<Real> t(mag * std::cos(ph), mag * std::sin(ph));
      const Real mv = -v;
      for (int m = 0; m <= order; ++m) {
        val.v[m] = t;
        t *= mv;
      }
      return val;
    };
    const auto bd = piece_breaks(pc, n, xr, y, E, order, tol);
    std::vector<Real> breaks(bd.begin(), bd.end());
    auto res = quad::integrate_panels(f, breaks, tol, zero, opt.max_depth);
    total += res.value;
    out.error += res.error;
    converged = converged && res.converged;
  }
  for (int m = 0; m <= order; ++m) {
    out.d[m] = Complex(static_cast<double>(total.v[m].real()),
                       static_cast<double>(total.v[m].imag()));
  }
  if (!converged && out.error > 10.0 * opt.tol) {
    throw Error(ErrorCode::QuadratureFailure,
                "F quadrature error " + std::to_string(out.error) + " exceeds tolerance at xi = (" +
                    std::to_string(xi.real()) + ", " + std::to_string(xi.imag()) + ")");
  }
  return out;
}

// Mean of f over a circle about xi0; exact for entire f up to aliasing.
template <class Fn>
ScaledComplex circle_mean(Fn&& f, Complex xi0, double log_scale, double radius = 0.25,
                          int points = 64) {
  Complex acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const Complex z = xi0 + radius * std::polar(1.0, 2.0 * kPi * (k + 0.5) / points);
    const ScaledComplex v = f(z);
    acc += v.mantissa * std::exp(v.log_scale - log_scale);
  }
  return {acc / static_cast<double>(points), log_scale};
}

double legendre_theta0(int n, double x) {
  const double t = x / n;
  return x * std::atan(t) - 0.5 * n * std::log1p(t * t);
}

}  // namespace

double WeightProfile::eta(double v) const {
  const double p = md.psi(v);
  if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
  return -n() * std::log(p);
}

double WeightProfile::eta_second(double v) const {
  for (const auto& pc : profile_pieces(md)) {
    if (v >= pc.lo && v <= pc.hi) {
      const double cv = std::cos(v + pc.s);
      return n() / (cv * cv);
    }
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<ProfilePiece> profile_pieces(const ModelDomain& md) {
  if (md.theta == 0.0) return {{md.v_min, md.v_max, std::min(1.0, md.r), 0.0}};
  if (md.theta > 0.0) {
    return {{md.v_min, md.v0, 1.0, 0.0}, {md.v0, md.v_max, md.r, md.theta}};
  }
  return {{md.v_min, md.v0, md.r, md.theta}, {md.v0, md.v_max, 1.0, 0.0}};
}

FDerivatives F_derivatives(const WeightProfile& wp, Complex xi, int order, const FOptions& opt) {
  if (order < 0 || order > kMaxDirectDerivative) {
    throw Error(ErrorCode::InvalidArgument, "derivative order must be in [0, 8]");
  }
  if (opt.precision == Precision::Double) return integrate_F<double>(wp, xi, order, opt);
  return integrate_F<long double>(wp, xi, order, opt);
}

ScaledComplex F(const WeightProfile& wp, Complex xi, const FOptions& opt) {
  return F_derivatives(wp, xi, 0, opt).value(0);
}

std::vector<Complex> F_taylor_cauchy(const WeightProfile& wp, Complex xi0, int count,
                                     double radius, double& log_scale, const FOptions& opt,
                                     int points) {
  std::vector<ScaledComplex> samples(points);
  double L = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const Complex z = xi0 + radius * std::polar(1.0, 2.0 * kPi * k / points);
    samples[k] = F(wp, z, opt);
    L = std::max(L, samples[k].log_scale);
  }
  std::vector<Complex> coeffs(count);
  for (int m = 0; m < count; ++m) {
    Complex acc = 0.0;
    for (int k = 0; k < points; ++k) {
      const Complex v = samples[k].mantissa * std::exp(samples[k].log_scale - L);
      acc += v * std::polar(1.0, -2.0 * kPi * k * m / points);
    }
    coeffs[m] = acc / (static_cast<double>(points) * std::pow(radius, m));
  }
  log_scale = L;
  return coeffs;
}

ScaledComplex F_derivative(const WeightProfile& wp, Complex xi, int m, const FOptions& opt,
                           double cauchy_radius) {
  if (m <= kMaxDirectDerivative) return F_derivatives(wp, xi, m, opt).value(m);
  double L = 0.0;
  const int points = std::max(64, 4 * m);
  const auto coeffs = F_taylor_cauchy(wp, xi, m + 1, cauchy_radius, L, opt, points);
  return {coeffs[m] * std::exp(std::lgamma(m + 1.0)), L};
}

std::vector<ScaledComplex> F_many(const WeightProfile& wp, const std::vector<Complex>& xis,
                                  const FOptions& opt, Exec exec) {
  std::vector<ScaledComplex> out(xis.size());
  const long count = static_cast<long>(xis.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < count; ++i) out[i] = F(wp, xis[i], opt);
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = F(wp, xis[i], opt);
    } catch (...) {
#pragma omp critical(bergman_f_many)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ScaledComplex F_closed_theta0(int j, Complex xi, double r) {
  const int n = j + 1;
  const double log_m = n * std::log(std::min(1.0, r));
  const bool odd = (n % 2) == 1;

  auto direct = [n, odd](Complex z) -> ScaledComplex {
    const double E = legendre_theta0(n, -z.real());
    const double lf = std::lgamma(n + 1.0);
    const Complex ep = std::exp(kPi * z / 2.0 + lf - E);
    const Complex em = std::exp(-kPi * z / 2.0 + lf - E);
    Complex num = odd ? ep + em : ep - em;
    Complex den = odd ? Complex(1.0) : z;
    for (int k = odd ? 1 : 2; k <= n; k += 2) den *= static_cast<double>(k * k) + z * z;
    return {num / den, E};
  };

  double dmin = odd ? std::numeric_limits<double>::infinity() : std::abs(xi);
  for (int k = odd ? 1 : 2; k <= n; k += 2) {
    dmin = std::min({dmin, std::abs(xi - Complex(0, k)), std::abs(xi + Complex(0, k))});
  }
  ScaledComplex v = dmin < 0.1 ? circle_mean(direct, xi, legendre_theta0(n, -xi.real()))
                               : direct(xi);
  v.log_scale += log_m;
  return v;
}

ScaledComplex F1_closed_r1(double theta, Complex xi) {
  if (theta == 0.0) return F_closed_theta0(0, xi, 1.0);
  if (theta < 0.0) return F1_closed_r1(-theta, -xi);
  const WeightProfile wp{make_model_domain(1.0, theta), 0};
  auto direct = [&wp, theta](Complex z) -> ScaledComplex {
    const double E = legendre(wp, -z.real()).value;
    const Complex num = std::exp(kPi * z / 2.0 - E) -
                        2.0 * std::sin(theta / 2) * std::exp(theta * z / 2.0 - E) +
                        std::exp((theta - kPi / 2) * z - E);
    return {num / (1.0 + z * z), E};
  };
  const double dmin = std::min(std::abs(xi - kI), std::abs(xi + kI));
  if (dmin < 0.1) return circle_mean(direct, xi, legendre(wp, -xi.real()).value);
  return direct(xi);
}

LegendreValue legendre(const WeightProfile& wp, double x) {
  const ModelDomain& md = wp.md;
  const int n = wp.n();
  if (md.theta == 0.0) {
    return {legendre_theta0(n, x) + n * std::log(std::min(1.0, md.r)), std::atan(x / n), 0};
  }
  if (md.theta < 0.0) {
    const WeightProfile mirrored{make_model_domain(md.r, -md.theta), wp.j};
    LegendreValue v = legendre(mirrored, -x);
    v.argmax = -v.argmax;
    v.branch = 2 - v.branch;
    return v;
  }
  const double a = n * std::tan(md.v0);
  const double b = n * std::tan(md.v0 + md.theta);
  if (x < a) return {legendre_theta0(n, x), std::atan(x / n), 0};
  if (x <= b) return {md.v0 * x + n * std::log(std::cos(md.v0)), md.v0, 1};
  return {legendre_theta0(n, x) - md.theta * x + n * std::log(md.r), std::atan(x / n) - md.theta,
          2};
}

std::pair<double, double> plateau(const WeightProfile& wp) {
  const ModelDomain& md = wp.md;
  const int n = wp.n();
  if (md.theta == 0.0) return {0.0, -1.0};
  if (md.theta > 0.0) return {n * std::tan(md.v0), n * std::tan(md.v0 + md.theta)};
  return {n * std::tan(md.v0 + md.theta), n * std::tan(md.v0)};
}

LegendreValue legendre_grid(const WeightProfile& wp, double x, int points) {
  const ModelDomain& md = wp.md;
  LegendreValue best{-std::numeric_limits<double>::infinity(), md.v0, 0};
  auto consider = [&](double v) {
    const double e = wp.eta(v);
    if (!std::isfinite(e)) return;
    const double val = x * v - e;
    if (val > best.value) best = {val, v, 0};
  };
  const double step = md.length() / points;
  for (int i = 1; i < points; ++i) consider(md.v_min + i * step);
  consider(md.v0);
  return best;
}

double H_constant(const ModelDomain& md) {
  if (!md.contains_v(0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 - std::log(md.psi(0.0));
}

LowerBoundReport lower_bound_check(const WeightProfile& wp, double x, double h, double c,
                                   const FOptions& opt) {
  LowerBoundReport rep;
  const ScaledComplex f = F(wp, Complex(-x, -h), opt);
  rep.log_abs_F = f.log_abs();
  const LegendreValue lv = legendre(wp, x);
  rep.plateau = lv.branch == 1;
  if (rep.plateau) {
    rep.log_bound = std::log(c) + lv.value - std::log(static_cast<double>(wp.n()));
  } else {
    rep.log_bound = std::log(c) + lv.value - 0.5 * std::log(wp.eta_second(lv.argmax));
  }
  rep.passed = rep.log_abs_F >= rep.log_bound;
  return rep;
}

}  // namespace bergman
