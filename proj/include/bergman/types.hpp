#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace bergman {

using Complex = std::complex<double>;
using C2 = std::array<Complex, 2>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// A complex number stored as mantissa * exp(log_scale). Used for F_{j+1},
/// whose magnitude spans hundreds of orders as Re xi varies.
struct ScaledComplex {
  Complex mantissa{};
  double log_scale = 0.0;

  Complex value() const { return mantissa * std::exp(log_scale); }
  double log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }
};

/// Hermitian inner product <z, w> = z1 conj(w1) + z2 conj(w2).
inline Complex inner(const C2& z, const C2& w) {
  return z[0] * std::conj(w[0]) + z[1] * std::conj(w[1]);
}

inline double norm2(const C2& z) { return std::norm(z[0]) + std::norm(z[1]); }

inline C2 operator-(const C2& a, const C2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline C2 operator+(const C2& a, const C2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline C2 operator*(Complex s, const C2& a) { return {s * a[0], s * a[1]}; }

}  // namespace bergman
