#include "bergman/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "bergman/errors.hpp"

namespace bergman {
namespace {

constexpr double kVeryRegular = 10.0;

void require_certified(const RootAtlas& atlas) {
  if (!atlas.cutoff_certified) {
    throw Error(ErrorCode::InsufficientAtlasDepth,
                "atlas frequency cutoff is not certified; deeper j may hold shallower roots");
  }
}

double three_over_p(double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "p must exceed 1");
  return std::isinf(p) ? 0.0 : 3.0 / p;
}

// Shallowest obstructing root over the atlas, or none.
std::vector<Obstruction> obstructions(const RootAtlas& atlas) {
  std::vector<Obstruction> out;
  for (const auto& e : atlas.entries) {
    for (const Root& r : e.roots) {
      if (r.multiplicity > 1) {
        out.push_back({e.j, r.xi, r.multiplicity, "multiple root (logarithmic term)"});
      } else if (!is_monomial_exponent(e.j, r.xi)) {
        out.push_back({e.j, r.xi, 1, "non-integer exponent i xi/2 - (j+3)/2"});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Obstruction& a, const Obstruction& b) {
    if (a.xi.imag() != b.xi.imag()) return a.xi.imag() > b.xi.imag();
    if (a.j != b.j) return a.j < b.j;
    return a.xi.real() < b.xi.real();
  });
  return out;
}

}  // namespace

double sobolev_threshold(double h, double p) {
  if (p == 2.0) return h / 2;
  return (h - 3.0) / 2 + three_over_p(p);
}

bool is_monomial_exponent(int j, Complex xi, double tol) {
  const Complex e = kI * xi / 2.0 - (j + 3.0) / 2.0;
  if (std::abs(e.imag()) > tol) return false;
  const double k = std::round(e.real());
  return k >= 0.0 && std::abs(e.real() - k) <= tol;
}

RegularityReport sobolev_report(const RootAtlas& atlas, double p) {
  require_certified(atlas);
  three_over_p(p);
  RegularityReport rep;
  rep.p = p;
  rep.scanned_depth = atlas.h;

  const auto depths = atlas.depths();
  rep.h_zero_free = depths.empty() ? atlas.h : depths.front();
  rep.h_zero_free = std::max(rep.h_zero_free, zero_free_depth(atlas.md));
  rep.s_positive = sobolev_threshold(rep.h_zero_free, p);
  rep.very_regular = rep.s_positive >= kVeryRegular;

  rep.obstructions = obstructions(atlas);
  if (rep.obstructions.empty()) {
    rep.h_star = std::numeric_limits<double>::infinity();
    rep.s_negative = std::numeric_limits<double>::infinity();
    rep.caveats.push_back("no obstructing root above depth " + std::to_string(atlas.h) +
                          "; negative threshold not determined by this scan");
  } else {
    rep.h_star = -rep.obstructions.front().xi.imag();
    rep.s_negative = std::max(0.0, sobolev_threshold(rep.h_star, p));
  }
  rep.caveats.push_back(
      "exclusion holds for most omega: the leading coefficient C(omega) must be nonzero");
  rep.caveats.push_back(
      "thresholds transfer to Omega by local diffeomorphism invariance of Sobolev spaces");
  return rep;
}

HolderReport holder_report(const RootAtlas& atlas, double epsilon) {
  require_certified(atlas);
  HolderReport rep;
  rep.epsilon = epsilon;
  const auto obs = obstructions(atlas);
  if (obs.empty()) {
    rep.h_star = std::numeric_limits<double>::infinity();
    rep.exclusion_order = std::numeric_limits<double>::infinity();
    rep.caveats.push_back("no obstructing root above depth " + std::to_string(atlas.h));
    return rep;
  }
  rep.h_star = -obs.front().xi.imag();
  rep.exclusion_order = (rep.h_star - 3.0) / 2;
  rep.arbitrarily_small = rep.exclusion_order < epsilon;
  if (rep.arbitrarily_small) {
    rep.caveats.push_back("kernel fails to be Hoelder of order " + std::to_string(epsilon));
  }
  return rep;
}

bool term_membership(int j, Complex d, double p, double s) {
  const double k = std::round(d.real());
  if (d.imag() == 0.0 && k >= 0.0 && d.real() == k) return true;
  return s < d.real() + j / 2.0 + three_over_p(p);
}

}  // namespace bergman
