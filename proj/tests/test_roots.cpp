#include <algorithm>

#include "bergman/errors.hpp"
#include "bergman/roots.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bergman;
using namespace bergman::testing;

namespace {

const ModelDomain kHalfPi = make_model_domain(1.0, kPi / 2);
const ModelDomain kTheta0 = make_model_domain(1.0, 0.0, true);

std::vector<double> depths(const StripScan& s) {
  std::vector<double> out;
  for (const Root& r : s.roots) out.push_back(-r.xi.imag());
  return out;
}

void check_depths(const StripScan& s, std::vector<double> expected) {
  const auto d = depths(s);
  REQUIRE(d.size() == expected.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(std::abs(d[i] - expected[i]) < 1e-8);
    CHECK(std::abs(s.roots[i].xi.real()) < 1e-8);
    CHECK(s.roots[i].multiplicity == 1);
  }
}

}  // namespace

TEST_CASE("argument-principle counts") {
  CHECK(count_zeros({kHalfPi, 0}, {-1, 1, -8, -6}) == 1);
  CHECK(count_zeros({kTheta0, 0}, {-1, 1, -4, -2}) == 1);
  CHECK(count_zeros({kHalfPi, 0}, {-1, 1, -6.5, -0.5}) == 0);
}

TEST_CASE("counts are additive over subdivisions") {
  const WeightProfile wp{kHalfPi, 1};
  const Rect big{-5, 5, -12, -0.5};
  const int total = count_zeros(wp, big);
  CHECK(total == 2);
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  for (int t = 0; t < 4; ++t) {
    const double xs = big.re_lo + big.width() * u(g);
    const double ys = big.im_lo + big.height() * u(g);
    const int sum = count_zeros(wp, {big.re_lo, xs, big.im_lo, ys}) +
                    count_zeros(wp, {xs, big.re_hi, big.im_lo, ys}) +
                    count_zeros(wp, {big.re_lo, xs, ys, big.im_hi}) +
                    count_zeros(wp, {xs, big.re_hi, ys, big.im_hi});
    CHECK(sum == total);
  }
}

TEST_CASE("strip scans reproduce the exact root sets") {
  check_depths(find_roots({kHalfPi, 0}, {20.0, 0.0}), {7, 9, 15, 17});
  check_depths(find_roots({make_model_domain(1.0, kPi / 3), 0}, {10.0, 0.0}), {5, 7});
  check_depths(find_roots({kTheta0, 1}, {10.0, 0.0}), {4, 6, 8});
}

TEST_CASE("refined roots are zeros to the envelope scale") {
  const WeightProfile wp{make_model_domain(1.3, 1.2), 2};
  const StripScan s = find_roots(wp, {14.0, 0.0});
  CHECK(!s.roots.empty());
  for (const Root& r : s.roots) {
    const ScaledComplex f = F(wp, r.xi, RootOptions{}.refine);
    CHECK(std::abs(f.mantissa) <= 1e-9);
    CHECK(r.xi.imag() < 0.0);
    CHECK(r.xi.imag() > -14.0);
  }
}

TEST_CASE("admissible depth selection") {
  const RootAtlas atlas = build_atlas_auto(kHalfPi, 12.0);
  CHECK(choose_admissible_h(atlas, 8.0) == 8.0);
  CHECK(choose_admissible_h(atlas, 6.0) == 6.0);
  const RootAtlas zero = build_atlas(kTheta0, 5.0, 1);
  CHECK(choose_admissible_h(zero, 3.5) == 3.5);
  const double h = choose_admissible_h(atlas, 9.1);
  for (double d : atlas.depths()) CHECK(std::abs(d - h) >= 0.25);
  CHECK(h <= 9.1);
}

TEST_CASE("atlas invariants") {
  const RootAtlas atlas = build_atlas_auto(kHalfPi, 16.0);
  CHECK(atlas.cutoff_certified);
  CHECK(pairing_check(atlas).closed);
  const double floor = zero_free_depth(kHalfPi);
  for (double d : atlas.depths()) CHECK(d > floor);

  const RootAtlas serial = build_atlas(kHalfPi, 16.0, atlas.jmax_scanned, {}, Exec::Serial);
  REQUIRE(serial.entries.size() == atlas.entries.size());
  for (std::size_t i = 0; i < serial.entries.size(); ++i) {
    REQUIRE(serial.entries[i].roots.size() == atlas.entries[i].roots.size());
    for (std::size_t k = 0; k < serial.entries[i].roots.size(); ++k) {
      CHECK(serial.entries[i].roots[k].xi == atlas.entries[i].roots[k].xi);
    }
  }

  // Frequencies past the cutoff stay zero-free well beyond it.
  const int cutoff = atlas.certified_empty_above_j + 1;
  for (int j = cutoff; j <= 4 * std::max(cutoff, 1); j += std::max(1, cutoff / 2)) {
    CHECK(count_zeros({kHalfPi, j}, {-60, 60, -16, -0.5}) == 0);
  }
}

TEST_CASE("pairing is a diagnostic away from r = 1") {
  const RootAtlas atlas = build_atlas_auto(make_model_domain(1.5, 0.4), 8.0);
  const PairingReport pr = pairing_check(atlas);
  for (const auto& [j, xi] : pr.unpaired) CHECK(xi.imag() < 0.0);
}

TEST_CASE("predicted roots") {
  const auto exact = predicted_roots(PredictionCase::R1ExactF1, 1.0, kPi / 2, 20.0);
  std::vector<double> live;
  bool cancelled_seen = false;
  for (const auto& p : exact) {
    if (p.cancelled) {
      cancelled_seen = true;
      CHECK(std::abs(p.xi - Complex(0, -1)) < 1e-12);
    } else {
      live.push_back(-p.xi.imag());
    }
  }
  CHECK(cancelled_seen);
  std::sort(live.begin(), live.end());
  REQUIRE(live.size() == 4);
  CHECK(live[0] == doctest::Approx(7));
  CHECK(live[3] == doctest::Approx(17));

  const auto small = predicted_roots(PredictionCase::R1SmallThetaF2, 1.0, 0.02);
  REQUIRE(!small.empty());
  CHECK((kI * small.front().xi).real() == doctest::Approx(4.0 + 0.16 / kPi).epsilon(1e-12));
  const StripScan s = find_roots({make_model_domain(1.0, 0.02), 1}, {4.5, 0.0});
  REQUIRE(!s.roots.empty());
  CHECK(std::abs(kI * s.roots.front().xi - kI * small.front().xi) <= 5 * 0.02 * 0.02);

  // r > 1: the error is third order, so err / theta^3 settles to a constant.
  double ratio[2] = {0.0, 0.0};
  int idx = 0;
  for (double theta : {0.01, 0.005}) {
    const auto large = predicted_roots(PredictionCase::RLargeSmallTheta, 1.5, theta);
    const StripScan s0 = find_roots({make_model_domain(1.5, theta), 0}, {3.5, 0.0});
    REQUIRE(s0.roots.size() == 1);
    bool matched = false;
    for (const auto& p : large) {
      if (p.j == 0 && p.k == 1) {
        matched = true;
        ratio[idx] = std::abs(p.xi - s0.roots.front().xi) / std::pow(theta, 3);
      }
    }
    CHECK(matched);
    ++idx;
  }
  CHECK(ratio[0] < 30.0);
  CHECK(ratio[1] == doctest::Approx(ratio[0]).epsilon(0.05));
  CHECK_THROWS_AS(predicted_roots(PredictionCase::R1SmallThetaF2, 1.0, 1.0), Error);
}
