#pragma once

#include <limits>
#include <string>
#include <vector>

#include "bergman/roots.hpp"

namespace bergman {

inline constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

struct Obstruction {
  int j = 0;
  Complex xi;
  int multiplicity = 1;
  std::string reason;
};

/// Sobolev thresholds for K(., omega) near the tangent point. Depths are
/// -Im xi. `s_positive` is the supremum of certified s; `s_negative` the
/// infimum of excluded s (infinite when no obstructing root was found).
struct RegularityReport {
  double h_zero_free = 0.0;  // largest zero-free depth used for the positive side
  double h_star = 0.0;       // depth of the shallowest obstructing root
  double p = 2.0;
  double s_positive = 0.0;
  double s_negative = 0.0;
  double scanned_depth = 0.0;
  bool very_regular = false;
  std::vector<Obstruction> obstructions;
  std::vector<std::string> caveats;
};

/// (h - 3)/2 + 3/p; returns h/2 exactly at p = 2.
double sobolev_threshold(double h, double p);

/// True when i xi/2 - (j + 3)/2 is a non-negative integer (the term is a monomial).
bool is_monomial_exponent(int j, Complex xi, double tol = 1e-8);

RegularityReport sobolev_report(const RootAtlas& atlas, double p);

struct HolderReport {
  double h_star = 0.0;
  double exclusion_order = 0.0;  // B^infinity_s excluded for s > (h* - 3)/2
  bool arbitrarily_small = false;
  double epsilon = 0.0;
  std::vector<std::string> caveats;
};

HolderReport holder_report(const RootAtlas& atlas, double epsilon = 0.1);

/// Membership of w1^j w2^d in L^p_s near w = 0. Non-negative integer d is a
/// polynomial and always a member; otherwise member iff s < Re d + j/2 + 3/p.
bool term_membership(int j, Complex d, double p, double s);

}  // namespace bergman
