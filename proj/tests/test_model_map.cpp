#include "bergman/errors.hpp"
#include "bergman/model_map.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bergman;
using namespace bergman::testing;

namespace {

struct Setup {
  ContactData cd;
  ProjectiveNormalization pn;
};

Setup setup(const BallPair& bp) {
  const ContactData cd = contact_data(bp);
  return {cd, build_normalization(cd)};
}

// Point of the sphere |z - c| = R inside the other ball, by rejection.
C2 boundary_point(const BallPair& bp, bool first, std::mt19937_64& g) {
  for (;;) {
    C2 d{crandn(g), crandn(g)};
    const double nd = std::sqrt(norm2(d));
    const C2 z = first ? (1.0 / nd) * d : bp.center() + (bp.r / nd) * d;
    const double other = first ? norm2(z - bp.center()) - bp.r * bp.r : norm2(z) - 1.0;
    if (other < -1e-3) return z;
  }
}

}  // namespace

TEST_CASE("normalization constants at chi = pi/3") {
  const auto [cd, pn] = setup({1.0, 0.0, 1.0});
  CHECK(std::abs(pn.lambda - std::polar(1.0, -kPi / 6) / kI) < 1e-14);
  CHECK(std::abs(std::abs(pn.lambda) - 1.0) < 1e-14);
  const Complex lm = pn.lambda * std::conj(pn.mu) * (std::exp(2.0 * kI * cd.chi) - 1.0);
  CHECK(std::abs(lm + 1.0) < 1e-14);
  CHECK(std::abs(pn.phi + std::polar(1.0, kPi / 3)) < 1e-12);
}

TEST_CASE("normalization invariants on random pairs") {
  std::mt19937_64 g(21);
  for (int i = 0; i < 200; ++i) {
    const BallPair bp = random_ball_pair(g);
    const auto [cd, pn] = setup(bp);
    const ContactData& w = pn.working;
    CHECK(std::abs(pn.phi + bp.r * std::polar(1.0, cd.theta)) < 1e-10);
    CHECK(std::abs(std::abs(pn.a21) - std::abs(w.balls.a1) / w.rho) < 1e-14);
    CHECK(std::abs(pn.A[2][0]) == 0.0);
    const Complex a00 = -std::conj(w.balls.a2 / w.balls.a1) * pn.a21;
    CHECK(std::abs(pn.A[0][0] - a00) < 1e-12 * std::max(1.0, std::abs(a00)));
    const Complex lm = pn.lambda * std::conj(pn.mu) * (std::exp(2.0 * kI * cd.chi) - 1.0);
    CHECK(std::abs(lm + 1.0) < 1e-12);
  }
}

TEST_CASE("vanishing a1 is handled by a coordinate swap") {
  const auto [cd, pn] = setup({0.0, Complex(0.3, 0.9), 1.1});
  CHECK(pn.swapped);
  CHECK(std::abs(pn.phi + 1.1 * std::polar(1.0, cd.theta)) < 1e-10);
  const ModelPoint w = map_to_model(cd.q, cd, pn);
  CHECK(std::abs(w.w1) < 1e-12);
  CHECK(std::abs(w.w2) < 1e-12);
  std::mt19937_64 g(22);
  for (int i = 0; i < 20; ++i) {
    const C2 z = random_interior(cd.balls, g);
    CHECK(in_model(map_to_model(z, cd, pn), pn.phi));
    CHECK(std::sqrt(norm2(map_from_model(map_to_model(z, cd, pn), pn) - z)) < 1e-10);
  }
}

TEST_CASE("q maps to the origin and the interior maps into the model") {
  std::mt19937_64 g(23);
  for (int k = 0; k < 10; ++k) {
    const BallPair bp = random_ball_pair(g);
    const auto [cd, pn] = setup(bp);
    const ModelPoint o = map_to_model(cd.q, cd, pn);
    CHECK(std::abs(o.w1) < 1e-12);
    CHECK(std::abs(o.w2) < 1e-12);
    for (int i = 0; i < 100; ++i) {
      const C2 z = random_interior(bp, g);
      const ModelPoint w = map_to_model(z, cd, pn);
      CHECK(in_model(w, pn.phi));
      CHECK(std::sqrt(norm2(map_from_model(w, pn) - z)) < 1e-10 * (1.0 + std::sqrt(norm2(z))));
    }
  }
}

TEST_CASE("points outside the closure are rejected") {
  const auto [cd, pn] = setup({1.0, 0.0, 1.0});
  CHECK_THROWS_AS(map_to_model({Complex(-0.9), Complex(0.0)}, cd, pn), Error);
}

TEST_CASE("boundary spheres pull back to the model defining functions") {
  std::mt19937_64 g(24);
  for (int k = 0; k < 10; ++k) {
    const BallPair bp = random_ball_pair(g);
    const auto [cd, pn] = setup(bp);
    for (int i = 0; i < 20; ++i) {
      for (bool first : {true, false}) {
        const ModelPoint w = map_to_model_unchecked(boundary_point(bp, first, g), pn);
        const auto dv = model_defining(w, pn.phi);
        const double scale = std::norm(w.w1) + 2.0 * std::abs(w.w2) + 1e-300;
        CHECK(std::abs(dv[first ? 0 : 1]) / scale < 1e-9);
        CHECK(dv[first ? 1 : 0] < 0.0);
      }
    }
  }
}

TEST_CASE("Jacobian determinant matches finite differences") {
  std::mt19937_64 g(25);
  const BallPair bp = random_ball_pair(g);
  const auto [cd, pn] = setup(bp);
  const double eps = 1e-6;
  for (int i = 0; i < 20; ++i) {
    const C2 z = random_interior(bp, g);
    Complex J[2][2];
    for (int c = 0; c < 2; ++c) {
      C2 zp = z, zm = z;
      zp[c] += eps;
      zm[c] -= eps;
      const ModelPoint wp = map_to_model_unchecked(zp, pn);
      const ModelPoint wm = map_to_model_unchecked(zm, pn);
      J[0][c] = (wp.w1 - wm.w1) / (2 * eps);
      J[1][c] = (wp.w2 - wm.w2) / (2 * eps);
    }
    const Complex fd = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const Complex det = jacobian_det(z, cd, pn);
    CHECK(rel_err(det, fd) < 1e-6);
    CHECK(std::abs(det) > 0.0);
  }
}

TEST_CASE("inverse map has reciprocal Jacobian") {
  std::mt19937_64 g(26);
  const BallPair bp = random_ball_pair(g);
  const auto [cd, pn] = setup(bp);
  const double eps = 1e-6;
  for (int i = 0; i < 10; ++i) {
    const ModelPoint w = map_to_model(random_interior(bp, g), cd, pn);
    Complex J[2][2];
    for (int c = 0; c < 2; ++c) {
      ModelPoint wp = w, wm = w;
      (c == 0 ? wp.w1 : wp.w2) += eps;
      (c == 0 ? wm.w1 : wm.w2) -= eps;
      const C2 zp = map_from_model(wp, pn);
      const C2 zm = map_from_model(wm, pn);
      J[0][c] = (zp[0] - zm[0]) / (2 * eps);
      J[1][c] = (zp[1] - zm[1]) / (2 * eps);
    }
    const Complex inv = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const Complex fwd = jacobian_det(map_from_model(w, pn), cd, pn);
    CHECK(std::abs(fwd * inv - 1.0) < 1e-6);
  }
}

TEST_CASE("model domain interval and kink") {
  const ModelDomain md = make_model_domain(1.3, 0.7);
  CHECK(md.v_min == doctest::Approx(-kPi / 2));
  CHECK(md.v_max == doctest::Approx(kPi / 2 - 0.7));
  CHECK(std::abs(std::cos(md.v0) - 1.3 * std::cos(md.v0 + 0.7)) < 1e-12);
  CHECK(md.contains_v(md.v0));
  const ModelDomain mn = make_model_domain(1.3, -0.7);
  CHECK(mn.v_min == doctest::Approx(-kPi / 2 + 0.7));
  CHECK(mn.v_max == doctest::Approx(kPi / 2));
  CHECK(std::abs(std::cos(mn.v0) - 1.3 * std::cos(mn.v0 - 0.7)) < 1e-12);
  for (int i = 1; i < 100; ++i) {
    CHECK(md.psi(md.v_min + md.length() * i / 100) > 0.0);
    CHECK(mn.psi(mn.v_min + mn.length() * i / 100) > 0.0);
  }
  CHECK(md.psi(md.v_min + 1e-9) < 1e-8);
  CHECK(md.psi(md.v_max - 1e-9) < 1e-8);
  CHECK_THROWS_AS(make_model_domain(1.0, 0.0), Error);
  CHECK_NOTHROW(make_model_domain(1.0, 0.0, true));
}

TEST_CASE("Hartogs map") {
  const HartogsPoint o = hartogs_forward({0.0, 1.0});
  CHECK(std::abs(o.t1) == 0.0);
  CHECK(std::abs(o.t2) == 0.0);
  CHECK_THROWS_AS(hartogs_forward({0.1, 0.0}), Error);

  std::mt19937_64 g(27);
  const BallPair bp = random_ball_pair(g);
  const auto [cd, pn] = setup(bp);
  const ModelDomain md = model_domain(cd);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ModelPoint w = map_to_model(random_interior(bp, g), cd, pn);
    const HartogsPoint t = hartogs_forward(w);
    const ModelPoint back = hartogs_inverse(t);
    worst = std::max(worst, std::abs(back.w1 - w.w1) + std::abs(back.w2 - w.w2));
    CHECK(in_hartogs(t, md) == in_model(w, pn.phi));
    CHECK(in_hartogs(t, md));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("Hartogs Jacobian matches finite differences") {
  const ModelPoint w{Complex(0.1, 0.05), Complex(0.4, -0.2)};
  const double eps = 1e-6;
  Complex J[2][2];
  for (int c = 0; c < 2; ++c) {
    ModelPoint wp = w, wm = w;
    (c == 0 ? wp.w1 : wp.w2) += eps;
    (c == 0 ? wm.w1 : wm.w2) -= eps;
    const HartogsPoint tp = hartogs_forward(wp), tm = hartogs_forward(wm);
    J[0][c] = (tp.t1 - tm.t1) / (2 * eps);
    J[1][c] = (tp.t2 - tm.t2) / (2 * eps);
  }
  CHECK(rel_err(hartogs_jacobian_det(w), J[0][0] * J[1][1] - J[0][1] * J[1][0]) < 1e-8);
}

TEST_CASE("real-circle action and rotation preserve the model") {
  std::mt19937_64 g(28);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const BallPair bp = random_ball_pair(g);
  const auto [cd, pn] = setup(bp);
  const ModelDomain md = model_domain(cd);
  for (int i = 0; i < 100; ++i) {
    const ModelPoint w = map_to_model(random_interior(bp, g), cd, pn);
    const double s = std::exp(4.0 * u(g) - 2.0);
    const Complex e = std::polar(1.0, 2 * kPi * u(g));
    CHECK(in_model({s * e * w.w1, s * s * w.w2}, pn.phi));
    const HartogsPoint t = hartogs_forward(w);
    CHECK(in_hartogs({e * t.t1, t.t2}, md));
  }
}
