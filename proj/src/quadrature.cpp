#include "bergman/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace bergman::quad {
namespace {

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double pi = std::numbers::pi_v<long double>;
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    long double dp = 0;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-21L) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2 / ((1 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const GaussRule r10 = make_rule(10);
  static const GaussRule r20 = make_rule(20);
  switch (n) {
    case 10: return r10;
    case 20: return r20;
    default: break;
  }
  throw std::invalid_argument("gauss_legendre: only 10 and 20 point rules are tabulated");
}

}  // namespace bergman::quad
