#pragma once

#include <cmath>
#include <random>

#include "bergman/geometry.hpp"
#include "bergman/model_map.hpp"

namespace bergman::testing {

inline double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

inline Complex crandn(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  return {n(g), n(g)};
}

/// Random transversal pair with margin well above the geometry epsilon.
inline BallPair random_ball_pair(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double rho = 0.2 + 1.6 * u(g);
    const double lo = std::abs(1.0 - rho);
    const double hi = 1.0 + rho;
    const double r = lo + (hi - lo) * (0.05 + 0.9 * u(g));
    C2 dir{crandn(g), crandn(g)};
    const double nd = std::sqrt(norm2(dir));
    BallPair bp{dir[0] / nd * rho, dir[1] / nd * rho, r};
    if (r > 0.05) return bp;
  }
}

/// Random point of the intersection, by rejection from the unit box.
inline C2 random_interior(const BallPair& bp, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    C2 z{Complex(u(g), u(g)), Complex(u(g), u(g))};
    if (in_omega(z, bp)) return z;
  }
}

/// Random 2x2 unitary applied to a vector.
inline C2 random_unitary_apply(std::mt19937_64& g, const C2& v, C2* second = nullptr,
                               const C2* w = nullptr) {
  C2 c1{crandn(g), crandn(g)};
  const double n1 = std::sqrt(norm2(c1));
  c1 = (1.0 / n1) * c1;
  C2 c2{-std::conj(c1[1]), std::conj(c1[0])};
  std::uniform_real_distribution<double> ph(0.0, 6.283185307179586);
  c2 = std::polar(1.0, ph(g)) * c2;
  auto apply = [&](const C2& x) { return C2{c1[0] * x[0] + c2[0] * x[1], c1[1] * x[0] + c2[1] * x[1]}; };
  if (second && w) *second = apply(*w);
  return apply(v);
}

}  // namespace bergman::testing
