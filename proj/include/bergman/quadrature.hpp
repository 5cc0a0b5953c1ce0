#pragma once

// Adaptive Gauss-Legendre quadrature on panels, usable with double or long
// double and with scalar or small-vector integrands. The error estimate of a
// panel is the difference between its 20-point and 10-point Gauss values; a
// panel that fails the estimate is bisected.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace bergman::quad {

struct GaussRule {
  std::vector<long double> nodes;    // on [-1, 1]
  std::vector<long double> weights;
};

/// Gauss-Legendre rule with n points, computed once in long double.
const GaussRule& gauss_legendre(int n);

/// Fixed-size vector of complex values, e.g. F and its first few derivatives.
template <class Real, std::size_t N>
struct CVec {
  std::array<std::complex<Real>, N> v{};
  std::size_t size = N;

  CVec& operator+=(const CVec& o) {
    for (std::size_t i = 0; i < size; ++i) v[i] += o.v[i];
    return *this;
  }
  friend CVec operator+(CVec a, const CVec& b) { return a += b; }
  friend CVec operator-(CVec a, const CVec& b) {
    for (std::size_t i = 0; i < a.size; ++i) a.v[i] -= b.v[i];
    return a;
  }
  friend CVec operator*(Real s, CVec a) {
    for (std::size_t i = 0; i < a.size; ++i) a.v[i] *= s;
    return a;
  }
};

template <class Real>
double err_norm(const std::complex<Real>& z) {
  return static_cast<double>(std::abs(z));
}

template <class Real>
double err_norm(Real x) {
  return static_cast<double>(std::abs(x));
}

template <class Real, std::size_t N>
double err_norm(const CVec<Real, N>& z) {
  double m = 0.0;
  for (std::size_t i = 0; i < z.size; ++i) m = std::max(m, static_cast<double>(std::abs(z.v[i])));
  return m;
}

template <class Value>
struct Result {
  Value value{};
  double error = 0.0;
  bool converged = true;
  long evaluations = 0;
};

namespace detail {

template <class Real, class Value, class Fn>
Value apply_rule(Fn& f, Real a, Real b, const GaussRule& rule, const Value& zero) {
  const Real half = (b - a) / 2;
  const Real mid = (a + b) / 2;
  Value acc = zero;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Real x = mid + half * static_cast<Real>(rule.nodes[i]);
    acc += static_cast<Real>(rule.weights[i]) * f(x);
  }
  return half * acc;
}

template <class Real, class Value, class Fn>
void adapt(Fn& f, Real a, Real b, double tol_density, int depth, int max_depth, const Value& zero,
           Result<Value>& out) {
  const Value q20 = apply_rule(f, a, b, gauss_legendre(20), zero);
  const Value q10 = apply_rule(f, a, b, gauss_legendre(10), zero);
  out.evaluations += 30;
  const double err = err_norm(q20 - q10);
  const double tol = tol_density * static_cast<double>(b - a);
  if (err <= tol || depth >= max_depth) {
    if (err > tol) out.converged = false;
    out.value += q20;
    out.error += err;
    return;
  }
  const Real mid = (a + b) / 2;
  adapt(f, a, mid, tol_density, depth + 1, max_depth, zero, out);
  adapt(f, mid, b, tol_density, depth + 1, max_depth, zero, out);
}

}  // namespace detail

/// Integrates f over [a, b] to absolute tolerance `abs_tol`. `zero` supplies
/// the additive identity (needed for vector-valued integrands).
template <class Real, class Value, class Fn>
Result<Value> integrate(Fn&& f, Real a, Real b, double abs_tol, const Value& zero,
                        int max_depth = 24) {
  Result<Value> out;
  out.value = zero;
  if (!(b > a)) return out;
  const double density = abs_tol / static_cast<double>(b - a);
  detail::adapt(f, a, b, density, 0, max_depth, zero, out);
  return out;
}

/// Integrates over consecutive panels given by `breaks`, splitting the
/// tolerance in proportion to panel width.
template <class Real, class Value, class Fn>
Result<Value> integrate_panels(Fn&& f, const std::vector<Real>& breaks, double abs_tol,
                               const Value& zero, int max_depth = 24) {
  Result<Value> out;
  out.value = zero;
  if (breaks.size() < 2) return out;
  const double total = static_cast<double>(breaks.back() - breaks.front());
  if (!(total > 0)) return out;
  const double density = abs_tol / total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    detail::adapt(f, breaks[i], breaks[i + 1], density, 0, max_depth, zero, out);
  }
  return out;
}

}  // namespace bergman::quad
