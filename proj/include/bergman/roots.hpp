#pragma once

// Zeros of F_{j+1} in strips -h < Im xi < 0: argument-principle counting on
// rectangles, subdivision plus Newton refinement, multi-frequency atlases,
// admissible depth selection, and the known special-case root formulas.

#include <optional>
#include <string>
#include <vector>

#include "bergman/exec.hpp"
#include "bergman/laplace.hpp"

namespace bergman {

struct Rect {
  double re_lo;
  double re_hi;
  double im_lo;
  double im_hi;

  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  Complex center() const { return {(re_lo + re_hi) / 2, (im_lo + im_hi) / 2}; }
  bool contains(Complex z, double pad = 0.0) const {
    return z.real() >= re_lo - pad && z.real() <= re_hi + pad && z.imag() >= im_lo - pad &&
           z.imag() <= im_hi + pad;
  }
};

struct RootOptions {
  FOptions scan{1e-12, Precision::Double, 30};
  FOptions refine{1e-15, Precision::Extended, 30};
  double initial_step = 0.25;
  double max_phase_step = kPi / 4;
  double boundary_zero = 1e-10;  // |F| below this times the scale counts as a zero
  double perturb_step = 1e-4;
  int max_perturb = 5;
  double newton_tol = 1e-10;
  int newton_max_iter = 60;
  double multiplicity_radius = 1e-3;
  double cluster_size = 1e-3;    // rectangles this small are not split further
};

/// Winding number of F_{j+1} along the boundary of `rect`. Edges are moved
/// outward by perturb_step when F vanishes on them (BoundaryZero after
/// max_perturb tries).
int count_zeros(const WeightProfile& wp, const Rect& rect, const RootOptions& opt = {});

struct Root {
  Complex xi;
  int multiplicity = 1;
  double residual = 0.0;  // |F(xi)| / exp(eta~(-Re xi))
};

struct StripSpec {
  double h = 0.0;
  double re_window = 0.0;  // half-width; 0 selects it by doubling until stable
};

struct StripScan {
  std::vector<Root> roots;
  double re_window = 0.0;
  double top = 0.0;  // upper edge of the scanned rectangle
};

/// Zero-free ceiling of the strip: |Im xi| <= pi / |J|.
double zero_free_depth(const ModelDomain& md);

/// All roots with -h < Im xi < 0, sorted by depth then real part.
StripScan find_roots(const WeightProfile& wp, const StripSpec& strip, const RootOptions& opt = {});

/// Roots inside a given rectangle (no window search).
std::vector<Root> find_roots_in(const WeightProfile& wp, const Rect& rect,
                                const RootOptions& opt = {});

/// Newton refinement xi <- xi - m F / F' in extended precision.
Root refine_root(const WeightProfile& wp, Complex xi0, int multiplicity,
                 const RootOptions& opt = {});

struct AtlasEntry {
  int j = 0;
  std::vector<Root> roots;
  double re_window = 0.0;
};

struct RootAtlas {
  ModelDomain md;
  double h = 0.0;
  std::vector<AtlasEntry> entries;   // one per scanned j, ascending
  int jmax_scanned = -1;
  int certified_empty_above_j = -1;  // last j with a root in the strip
  bool cutoff_certified = false;     // trailing empty run plus lower-bound check

  std::vector<double> depths() const;  // sorted -Im xi over all roots
  std::size_t root_count() const;
};

struct AtlasOptions {
  RootOptions roots;
  int empty_run = 3;       // consecutive empty j needed for the cutoff
  int hard_jmax = 400;
};

/// Scans j = 0..jmax.
RootAtlas build_atlas(const ModelDomain& md, double h, int jmax, const AtlasOptions& opt = {},
                      Exec exec = Exec::Parallel);

/// Scans j upward in batches until the cutoff rule certifies the rest empty.
RootAtlas build_atlas_auto(const ModelDomain& md, double h, const AtlasOptions& opt = {},
                           Exec exec = Exec::Parallel);

/// Largest h <= target that stays away from every root depth: the target
/// itself if no root depth is within `gap` of it, otherwise the midpoint
/// between the bracketing depths.
double choose_admissible_h(const RootAtlas& atlas, double target, double gap = 0.25);

/// Builds an atlas one unit deeper than the target, then selects h.
double choose_admissible_h(const ModelDomain& md, double target, const AtlasOptions& opt = {},
                           Exec exec = Exec::Parallel);

struct PairingReport {
  bool closed = true;
  std::vector<std::pair<int, Complex>> unpaired;  // (j, xi) without a -conj(xi) partner
};

/// Checks closure of each F_{j+1} root set under xi -> -conj(xi).
PairingReport pairing_check(const RootAtlas& atlas, double tol = 1e-6);

enum class PredictionCase {
  R1ExactF1,         // r = 1, all roots of F_1 from the explicit formula
  R1SmallThetaF2,    // r = 1, theta ~ 0, first root of F_2
  RLargeSmallTheta,  // r > 1, theta ~ 0, roots of F_1 and F_2
  R1NearPiF2,        // r = 1, theta = pi - eps, first root pair of F_2
};

struct PredictedRoot {
  int j = 0;
  int k = 0;
  Complex xi;
  std::string error_order;  // e.g. "exact", "O(theta^2)"
  bool cancelled = false;   // formula entry that is not an actual zero
};

/// Special-case formulas. Throws OutOfRegime when (r, theta) is outside the
/// regime of the requested case.
std::vector<PredictedRoot> predicted_roots(PredictionCase which, double r, double theta,
                                           double max_depth = 40.0, int kmax = 4);

}  // namespace bergman
