#include "bergman/errors.hpp"
#include "bergman/laplace.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bergman;
using namespace bergman::testing;

namespace {

// Maximum of a concave function on [lo, hi] by ternary search.
template <class Fn>
double concave_max(Fn&& f, double lo, double hi) {
  for (int it = 0; it < 300; ++it) {
    const double m1 = lo + (hi - lo) / 3;
    const double m2 = hi - (hi - lo) / 3;
    (f(m1) < f(m2) ? lo : hi) = (f(m1) < f(m2) ? m1 : m2);
  }
  return f((lo + hi) / 2);
}

const ModelDomain kTheta0 = make_model_domain(1.0, 0.0, true);
const ModelDomain kHalfPi = make_model_domain(1.0, kPi / 2);

}  // namespace

TEST_CASE("F special values") {
  CHECK(F({kTheta0, 0}, 0.0).value().real() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(F({kTheta0, 1}, 0.0).value().real() == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(F({kHalfPi, 0}, 0.0).value().real() == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(F_closed_theta0(0, 0.0).value().real() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(F1_closed_r1(kPi / 2, 0.0).value().real() ==
        doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("closed forms against quadrature") {
  CHECK(rel_err(F_closed_theta0(0, kI).value(), F({kTheta0, 0}, kI).value()) < 1e-9);
  CHECK(rel_err(F_closed_theta0(2, 2.0).value(), F({kTheta0, 2}, 2.0).value()) < 1e-10);
  const ModelDomain r2 = make_model_domain(0.7, 0.0, true);
  CHECK(rel_err(F_closed_theta0(1, Complex(1.5, -2.0), 0.7).value(),
                F({r2, 1}, Complex(1.5, -2.0)).value()) < 1e-10);
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> th(0.1, 3.0), re(-10.0, 10.0), im(-12.0, 0.0);
  for (int i = 0; i < 40; ++i) {
    const double theta = th(g);
    const Complex xi(re(g), im(g));
    const ScaledComplex c = F1_closed_r1(theta, xi);
    const ScaledComplex q = F({make_model_domain(1.0, theta), 0}, xi);
    CHECK(std::abs(c.log_scale - q.log_scale) < 1e-12);
    CHECK(std::abs(c.mantissa - q.mantissa) / std::max(std::abs(q.mantissa), 1e-4) < 1e-10);
  }
  CHECK(std::abs(F1_closed_r1(kPi / 2, Complex(0, -7)).mantissa) < 1e-12);
}

TEST_CASE("derivatives") {
  const WeightProfile wp{make_model_domain(1.2, 0.8), 2};
  std::mt19937_64 g(32);
  std::uniform_real_distribution<double> re(-8.0, 8.0), im(-6.0, 0.0);
  const double d = 1e-4;
  for (int i = 0; i < 20; ++i) {
    const Complex xi(re(g), im(g));
    const FDerivatives fd = F_derivatives(wp, xi, 3);
    const Complex num = (F(wp, xi + d).value() - F(wp, xi - d).value()) / (2 * d);
    CHECK(rel_err(fd.value(1).value(), num) < 1e-7);
    double ls = 0.0;
    const auto taylor = F_taylor_cauchy(wp, xi, 4, 0.25, ls);
    for (int m = 1; m <= 3; ++m) {
      const double fact = m == 3 ? 6.0 : m;
      CHECK(rel_err(taylor[m] * fact * std::exp(ls), fd.value(m).value()) < 1e-7);
    }
  }
  const FDerivatives f0 = F_derivatives({kTheta0, 0}, 0.0, 1);
  CHECK(std::abs(f0.d[1]) < 1e-14);
  const ScaledComplex high = F_derivative(wp, Complex(1.0, -2.0), 9);
  const ScaledComplex direct = F_derivative(wp, Complex(1.0, -2.0), 8);
  CHECK(std::isfinite(high.log_abs()));
  CHECK(std::isfinite(direct.log_abs()));
}

TEST_CASE("reality symmetry") {
  const WeightProfile wp{make_model_domain(0.8, 1.1), 1};
  for (double x = -15; x <= 15; x += 2.5) {
    for (double y = -9; y <= 0; y += 1.5) {
      const Complex xi(x, y);
      CHECK(rel_err(std::conj(F(wp, xi).value()), F(wp, std::conj(xi)).value()) < 1e-12);
    }
  }
}

TEST_CASE("zero-free strip by positivity") {
  std::mt19937_64 g(33);
  std::uniform_real_distribution<double> ur(0.5, 2.0), ut(-2.8, 2.8);
  for (int k = 0; k < 6; ++k) {
    const ModelDomain md = make_model_domain(ur(g), ut(g));
    const double vs = (md.v_min + md.v_max) / 2;
    const double depth = kPi / md.length() - 1e-3;
    for (int j : {0, 3}) {
      const WeightProfile wp{md, j};
      for (double x = -40; x <= 40; x += 4) {
        for (double y : {-depth, -depth / 2, 0.0, depth / 2, depth}) {
          const Complex xi(x, y);
          const ScaledComplex f = F(wp, xi);
          CHECK((std::exp(vs * xi) * f.mantissa).real() > 0.0);
        }
      }
    }
  }
}

TEST_CASE("horizontal-line decay follows the envelope") {
  const WeightProfile wp{kHalfPi, 1};
  const double h = 3.0;
  const double b = -0.6;  // b/2 inside J
  double prev_right = 0.0, prev_left = 0.0;
  for (double x : {20.0, 40.0, 80.0}) {
    const ScaledComplex fr = F(wp, Complex(-x, -h));
    const ScaledComplex fl = F(wp, Complex(x, -h));
    const double right = x * b / 2 - fr.log_abs();
    const double left = -x * b / 2 - fl.log_abs();
    CHECK(std::abs(right - (x * b / 2 - legendre(wp, x).value)) < 8.0);
    CHECK(std::abs(left - (-x * b / 2 - legendre(wp, -x).value)) < 8.0);
    if (x > 20.0) {
      CHECK(right < prev_right);
      CHECK(left < prev_left);
    }
    prev_right = right;
    prev_left = left;
  }
}

TEST_CASE("eta convexity and second derivative") {
  const WeightProfile wp{make_model_domain(1.4, 0.6), 2};
  const double d = 1e-4;
  for (int i = 1; i < 40; ++i) {
    const double v = wp.md.v_min + wp.md.length() * i / 40;
    if (std::abs(v - wp.md.v0) < 0.05) continue;
    const double fd = (wp.eta(v + d) - 2 * wp.eta(v) + wp.eta(v - d)) / (d * d);
    CHECK(fd == doctest::Approx(wp.eta_second(v)).epsilon(1e-5));
    CHECK(wp.eta_second(v) > 0.0);
  }
}

TEST_CASE("Legendre envelope") {
  const WeightProfile w1{kHalfPi, 0};
  const LegendreValue at0 = legendre(w1, 0.0);
  CHECK(at0.value == doctest::Approx(std::log(std::sqrt(2.0) / 2)).epsilon(1e-14));
  CHECK(at0.argmax == doctest::Approx(-kPi / 4).epsilon(1e-14));
  CHECK(at0.branch == 1);

  const WeightProfile w3{kHalfPi, 2};
  for (double x = -30; x <= 30; x += 0.7) {
    CHECK(std::abs(legendre(w3, 3 * x).value - 3 * legendre(w1, x).value) < 1e-10);
  }

  std::mt19937_64 g(34);
  std::uniform_real_distribution<double> ux(-10.0, 10.0);
  for (double theta : {0.4, -0.9, 2.5}) {
    const WeightProfile wp{make_model_domain(1.3, theta), 1};
    for (int i = 0; i < 10; ++i) {
      const double x = ux(g);
      const LegendreValue c = legendre(wp, x);
      CHECK(std::abs(c.value - legendre_grid(wp, x, 200000).value) < 1e-8);
      CHECK(std::abs(c.value - (x * c.argmax - wp.eta(c.argmax))) < 1e-12);
    }
    double prev = -10.0;
    for (double x = -50; x <= 50; x += 0.5) {
      const double mu = legendre(wp, x).argmax;
      CHECK(mu >= prev - 1e-15);
      prev = mu;
    }
    const auto [a, b] = plateau(wp);
    CHECK(legendre(wp, a + 1e-9).branch == 1);
    CHECK(legendre(wp, (a + b) / 2).argmax == doctest::Approx(wp.md.v0));
  }
}

TEST_CASE("Legendre duality reproduces eta") {
  const WeightProfile wp{make_model_domain(0.9, 0.7), 0};
  for (int i = 1; i < 20; ++i) {
    const double v = wp.md.v_min + 0.2 + (wp.md.length() - 0.4) * i / 20;
    const double back =
        concave_max([&](double x) { return x * v - legendre(wp, x).value; }, -500.0, 500.0);
    CHECK(std::abs(back - wp.eta(v)) < 1e-6);
  }
}

TEST_CASE("H constant") {
  const ModelDomain md = make_model_domain(1.0, kPi / 3);
  CHECK(H_constant(md) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-14));
  const WeightProfile w{md, 0};
  const double inf_eta = -concave_max([&](double x) { return -legendre(w, x).value; }, -50, 50);
  CHECK(std::abs(1.0 - inf_eta - H_constant(md)) < 1e-8);
  CHECK(std::isinf(H_constant(kHalfPi)));
  for (double theta : {-1.0, 0.3, 1.2}) CHECK(H_constant(make_model_domain(0.95, theta)) >= 1.0);
}

TEST_CASE("lower bound diagnostics") {
  const WeightProfile w20{kHalfPi, 20};
  CHECK(lower_bound_check(w20, 0.0, 1.0).passed);
  const WeightProfile w2{make_model_domain(1.2, 0.9), 2};
  for (double x : {-5.0, 0.0, 7.0}) {
    const ScaledComplex f = F(w2, Complex(-x, 0.0));
    CHECK(std::abs(f.mantissa.imag()) < 1e-12 * std::abs(f.mantissa));
    CHECK(f.mantissa.real() > 0.0);
    CHECK(lower_bound_check(w2, x, 0.0).passed);
  }
  const auto [a, b] = plateau(w2);
  CHECK(lower_bound_check(w2, a + 1e-12, 0.5).plateau);
}

TEST_CASE("batched evaluation matches serial") {
  const WeightProfile wp{make_model_domain(1.1, 0.5), 1};
  std::vector<Complex> xs;
  for (int i = 0; i < 64; ++i) xs.emplace_back(-20.0 + 0.6 * i, -0.1 * i);
  const auto a = F_many(wp, xs, {}, Exec::Serial);
  const auto b = F_many(wp, xs, {}, Exec::Parallel);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(a[i].mantissa == b[i].mantissa);
    CHECK(a[i].log_scale == b[i].log_scale);
  }
}
