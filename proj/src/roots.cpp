#include "bergman/roots.hpp"

#include <algorithm>
#include <exception>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {
namespace {

struct Sample {
  Complex f;   // F / scale
  Complex df;  // F' / scale
};

Sample sample(const WeightProfile& wp, Complex z, const RootOptions& opt) {
  const FDerivatives d = F_derivatives(wp, z, 1, opt.scan);
  return {d.d[0], d.d[1]};
}

// Phase increment of F along the segment a -> b. Returns false when F
// (nearly) vanishes on the segment.
bool walk_edge(const WeightProfile& wp, Complex a, Complex b, const RootOptions& opt,
               double& total) {
  const double len = std::abs(b - a);
  const Complex dir = (b - a) / len;
  Sample s = sample(wp, a, opt);
  if (std::abs(s.f) < opt.boundary_zero) return false;
  double t = 0.0;
  double ds = std::min(opt.initial_step, len);
  const double max_step = 4.0 * opt.initial_step;
  while (t < len) {
    const double guard = 0.5 * std::abs(s.f) / std::max(std::abs(s.df), 1e-300);
    double step = std::min({ds, len - t, guard});
    if (step < 1e-10) {
      throw Error(ErrorCode::NonConvergent, "argument sampling step underflow on rectangle edge");
    }
    const Sample s2 = sample(wp, a + dir * (t + step), opt);
    if (std::abs(s2.f) < opt.boundary_zero) return false;
    const double dphi = std::arg(s2.f / s.f);
    if (std::abs(dphi) > opt.max_phase_step) {
      ds = step / 2;
      continue;
    }
    total += dphi;
    t += step;
    s = s2;
    ds = std::min(step * 1.5, max_step);
  }
  return true;
}

std::optional<int> winding(const WeightProfile& wp, const Rect& r, const RootOptions& opt) {
  const Complex c[4] = {{r.re_lo, r.im_lo}, {r.re_hi, r.im_lo}, {r.re_hi, r.im_hi},
                        {r.re_lo, r.im_hi}};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    if (!walk_edge(wp, c[e], c[(e + 1) % 4], opt, total)) return std::nullopt;
  }
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.1) {
    throw Error(ErrorCode::NonConvergent,
                "winding number not close to an integer: " + std::to_string(turns));
  }
  return static_cast<int>(rounded);
}

// Count with outward perturbation; returns the rectangle actually used.
std::pair<int, Rect> count_perturbed(const WeightProfile& wp, Rect rect, const RootOptions& opt) {
  for (int k = 0; k <= opt.max_perturb; ++k) {
    if (auto n = winding(wp, rect, opt)) return {*n, rect};
    const double d = opt.perturb_step;
    rect = {rect.re_lo - d, rect.re_hi + d, rect.im_lo - d, rect.im_hi + d};
  }
  throw Error(ErrorCode::BoundaryZero, "F vanishes on the rectangle boundary after perturbation");
}

void sort_roots(std::vector<Root>& roots) {
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    if (a.xi.imag() != b.xi.imag()) return a.xi.imag() > b.xi.imag();
    return a.xi.real() < b.xi.real();
  });
}

void dedupe(std::vector<Root>& roots, double tol) {
  std::vector<Root> out;
  for (const Root& r : roots) {
    bool dup = false;
    for (const Root& o : out) dup = dup || std::abs(o.xi - r.xi) < tol;
    if (!dup) out.push_back(r);
  }
  roots.swap(out);
}

class Solver {
 public:
  Solver(const WeightProfile& wp, const RootOptions& opt) : wp_(wp), opt_(opt) {}

  void solve(const Rect& rect, int n, std::vector<Root>& out, int depth = 0) {
    if (n <= 0) return;
    if (n < 0 || depth > 80) {
      throw Error(ErrorCode::NonConvergent, "rectangle subdivision did not isolate the roots");
    }
    const double size = std::max(rect.width(), rect.height());
    if (size <= opt_.cluster_size) {
      resolve_cluster(rect, n, out);
      return;
    }
    if (n == 1 && size <= 2.0) {
      try {
        Root r = refine_root(wp_, rect.center(), 1, opt_);
        if (rect.contains(r.xi, 1e-9)) {
          r.multiplicity = local_multiplicity(r.xi);
          out.push_back(r);
          return;
        }
      } catch (const Error&) {
        // fall through to subdivision
      }
    }
    split(rect, n, out, depth);
  }

 private:
  int local_multiplicity(Complex xi) {
    const double d = opt_.multiplicity_radius;
    const Rect sq{xi.real() - d, xi.real() + d, xi.imag() - d, xi.imag() + d};
    auto n = winding(wp_, sq, opt_);
    return n ? std::max(*n, 1) : 1;
  }

  void resolve_cluster(const Rect& rect, int n, std::vector<Root>& out) {
    // Distinct simple roots inside a tiny box are separated by plain Newton
    // from several starts; otherwise the cluster is one multiple root.
    std::vector<Root> simple;
    const Complex starts[5] = {rect.center(), {rect.re_lo, rect.im_lo}, {rect.re_hi, rect.im_lo},
                               {rect.re_hi, rect.im_hi}, {rect.re_lo, rect.im_hi}};
    for (Complex s : starts) {
      try {
        Root r = refine_root(wp_, s, 1, opt_);
        if (rect.contains(r.xi, rect.width())) simple.push_back(r);
      } catch (const Error&) {
      }
    }
    dedupe(simple, 1e-7);
    if (static_cast<int>(simple.size()) == n) {
      for (auto& r : simple) out.push_back(r);
      return;
    }
    Root r = refine_root(wp_, rect.center(), n, opt_);
    r.multiplicity = n;
    out.push_back(r);
  }

  void split(const Rect& rect, int n, std::vector<Root>& out, int depth) {
    const bool vertical = rect.width() >= rect.height();
    const double lo = vertical ? rect.re_lo : rect.im_lo;
    const double hi = vertical ? rect.re_hi : rect.im_hi;
    static constexpr double offsets[] = {0.0, 0.0137, -0.0291, 0.0419, -0.0533, 0.0671};
    for (double off : offsets) {
      const double cut = (lo + hi) / 2 + off * (hi - lo);
      Rect a = rect;
      Rect b = rect;
      if (vertical) {
        a.re_hi = cut;
        b.re_lo = cut;
      } else {
        a.im_hi = cut;
        b.im_lo = cut;
      }
      const auto na = winding(wp_, a, opt_);
      if (!na) continue;
      const auto nb = winding(wp_, b, opt_);
      if (!nb) continue;
      if (*na + *nb != n) {
        throw Error(ErrorCode::NonConvergent, "root counts of a subdivision do not add up");
      }
      solve(a, *na, out, depth + 1);
      solve(b, *nb, out, depth + 1);
      return;
    }
    throw Error(ErrorCode::BoundaryZero, "could not place a zero-free subdivision line");
  }

  const WeightProfile& wp_;
  const RootOptions& opt_;
};

bool lower_bound_certified(const WeightProfile& wp, double h) {
  const auto [a, b] = plateau(wp);
  std::vector<double> xs{0.0, -10.0 * wp.n(), 10.0 * wp.n()};
  if (a <= b) xs.push_back((a + b) / 2);
  for (double x : xs) {
    if (!lower_bound_check(wp, x, h, 1e-3, {1e-12, Precision::Double, 30}).passed) return false;
  }
  return true;
}

AtlasEntry scan_j(const ModelDomain& md, int j, double h, const RootOptions& opt) {
  const WeightProfile wp{md, j};
  const StripScan sc = find_roots(wp, {h, 0.0}, opt);
  return {j, sc.roots, sc.re_window};
}

void scan_range(const ModelDomain& md, double h, int j0, int j1, const RootOptions& opt,
                Exec exec, std::vector<AtlasEntry>& entries) {
  const int count = j1 - j0 + 1;
  std::vector<AtlasEntry> batch(count);
  if (exec == Exec::Serial) {
    for (int i = 0; i < count; ++i) batch[i] = scan_j(md, j0 + i, h, opt);
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) {
      try {
        batch[i] = scan_j(md, j0 + i, h, opt);
      } catch (...) {
#pragma omp critical(bergman_scan_range)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  for (auto& e : batch) entries.push_back(std::move(e));
}

void finalize(RootAtlas& atlas, const AtlasOptions& opt) {
  atlas.jmax_scanned = atlas.entries.empty() ? -1 : atlas.entries.back().j;
  atlas.certified_empty_above_j = -1;
  for (const auto& e : atlas.entries) {
    if (!e.roots.empty()) atlas.certified_empty_above_j = e.j;
  }
  const int trailing = atlas.jmax_scanned - atlas.certified_empty_above_j;
  atlas.cutoff_certified =
      trailing >= opt.empty_run &&
      lower_bound_certified(WeightProfile{atlas.md, atlas.jmax_scanned}, atlas.h);
}

}  // namespace

int count_zeros(const WeightProfile& wp, const Rect& rect, const RootOptions& opt) {
  return count_perturbed(wp, rect, opt).first;
}

double zero_free_depth(const ModelDomain& md) { return kPi / md.length(); }

Root refine_root(const WeightProfile& wp, Complex xi0, int multiplicity, const RootOptions& opt) {
  Complex xi = xi0;
  bool converged = false;
  for (int it = 0; it < opt.newton_max_iter; ++it) {
    const FDerivatives d = F_derivatives(wp, xi, 1, opt.refine);
    if (std::abs(d.d[1]) == 0.0) break;
    const Complex step = static_cast<double>(multiplicity) * d.d[0] / d.d[1];
    xi -= step;
    if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) break;
    if (std::abs(step) <= opt.newton_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NonConvergent, "Newton refinement did not converge");
  }
  // One polishing step after the tolerance is met.
  const FDerivatives d = F_derivatives(wp, xi, 1, opt.refine);
  if (std::abs(d.d[1]) > 0.0) {
    const Complex step = static_cast<double>(multiplicity) * d.d[0] / d.d[1];
    if (std::abs(step) <= opt.newton_tol) xi -= step;
  }
  Root r;
  r.xi = xi;
  r.multiplicity = multiplicity;
  r.residual = std::abs(F(wp, xi, opt.refine).mantissa);
  return r;
}

std::vector<Root> find_roots_in(const WeightProfile& wp, const Rect& rect,
                                const RootOptions& opt) {
  const auto [n, used] = count_perturbed(wp, rect, opt);
  std::vector<Root> roots;
  Solver(wp, opt).solve(used, n, roots);
  dedupe(roots, 1e-8);
  sort_roots(roots);
  return roots;
}

StripScan find_roots(const WeightProfile& wp, const StripSpec& strip, const RootOptions& opt) {
  if (!(strip.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "strip depth must be positive");
  StripScan out;
  out.top = -0.5 * std::min(zero_free_depth(wp.md), strip.h);
  if (strip.h <= zero_free_depth(wp.md)) {
    out.re_window = strip.re_window;
    return out;  // the whole strip lies in the zero-free region
  }
  auto rect_for = [&](double w) { return Rect{-w, w, -strip.h, out.top}; };
  double w = strip.re_window;
  if (w <= 0.0) {
    w = 16.0;
    int c1 = count_zeros(wp, rect_for(w), opt);
    int c2 = count_zeros(wp, rect_for(2 * w), opt);
    int c3 = count_zeros(wp, rect_for(4 * w), opt);
    while (!(c1 == c2 && c2 == c3)) {
      if (w > 4096.0) {
        throw Error(ErrorCode::NonConvergent, "root count does not stabilize as the window grows");
      }
      w *= 2;
      c1 = c2;
      c2 = c3;
      c3 = count_zeros(wp, rect_for(4 * w), opt);
    }
  }
  out.re_window = w;
  std::vector<Root> roots = find_roots_in(wp, rect_for(w), opt);
  for (const Root& r : roots) {
    if (r.xi.imag() > -strip.h && r.xi.imag() < 0.0) out.roots.push_back(r);
  }
  return out;
}

std::vector<double> RootAtlas::depths() const {
  std::vector<double> d;
  for (const auto& e : entries) {
    for (const auto& r : e.roots) d.push_back(-r.xi.imag());
  }
  std::sort(d.begin(), d.end());
  return d;
}

std::size_t RootAtlas::root_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.roots.size();
  return n;
}

RootAtlas build_atlas(const ModelDomain& md, double h, int jmax, const AtlasOptions& opt,
                      Exec exec) {
  RootAtlas atlas;
  atlas.md = md;
  atlas.h = h;
  scan_range(md, h, 0, jmax, opt.roots, exec, atlas.entries);
  finalize(atlas, opt);
  return atlas;
}

RootAtlas build_atlas_auto(const ModelDomain& md, double h, const AtlasOptions& opt, Exec exec) {
  RootAtlas atlas;
  atlas.md = md;
  atlas.h = h;
  const int batch = 4;
  int next = 0;
  while (next <= opt.hard_jmax) {
    const int last = std::min(next + batch - 1, opt.hard_jmax);
    scan_range(md, h, next, last, opt.roots, exec, atlas.entries);
    next = last + 1;
    int trailing = 0;
    for (auto it = atlas.entries.rbegin(); it != atlas.entries.rend() && it->roots.empty(); ++it) {
      ++trailing;
    }
    if (trailing >= opt.empty_run) break;
  }
  finalize(atlas, opt);
  // Trim to the shortest certified prefix so output does not depend on the batch size.
  const int keep = atlas.certified_empty_above_j + opt.empty_run;
  if (atlas.jmax_scanned > keep) {
    atlas.entries.resize(static_cast<std::size_t>(keep + 1));
    finalize(atlas, opt);
  }
  return atlas;
}

double choose_admissible_h(const RootAtlas& atlas, double target, double gap) {
  std::vector<double> depths = atlas.depths();
  auto clearance = [&](double h) {
    double m = std::numeric_limits<double>::infinity();
    for (double d : depths) m = std::min(m, std::abs(d - h));
    return m;
  };
  if (clearance(target) >= gap) return target;
  std::vector<double> edges{0.0};
  for (double d : depths) {
    if (d > edges.back() + 1e-12) edges.push_back(d);
  }
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double mid = (edges[i] + edges[i + 1]) / 2;
    if (mid <= target) best = std::max(best, mid);
  }
  if (best == 0.0) best = std::min(target, edges.size() > 1 ? edges[1] / 2 : target);
  return best;
}

double choose_admissible_h(const ModelDomain& md, double target, const AtlasOptions& opt,
                           Exec exec) {
  const RootAtlas atlas = build_atlas_auto(md, target + 1.0, opt, exec);
  return choose_admissible_h(atlas, target);
}

PairingReport pairing_check(const RootAtlas& atlas, double tol) {
  PairingReport rep;
  for (const auto& e : atlas.entries) {
    for (const auto& r : e.roots) {
      const Complex mirror = -std::conj(r.xi);
      bool found = false;
      for (const auto& o : e.roots) {
        found = found || (std::abs(o.xi - mirror) <= tol && o.multiplicity == r.multiplicity);
      }
      if (!found) {
        rep.closed = false;
        rep.unpaired.emplace_back(e.j, r.xi);
      }
    }
  }
  return rep;
}

std::vector<PredictedRoot> predicted_roots(PredictionCase which, double r, double theta,
                                           double max_depth, int kmax) {
  const double at = std::abs(theta);
  auto out_of_regime = [](const std::string& why) {
    throw Error(ErrorCode::OutOfRegime, why);
  };
  std::vector<PredictedRoot> out;
  // i xi = A + i B  <=>  xi = B - i A.
  auto from_ixi = [](Complex ixi) { return Complex(ixi.imag(), -ixi.real()); };
  switch (which) {
    case PredictionCase::R1ExactF1: {
      if (std::abs(r - 1.0) > 1e-12 || theta == 0.0) out_of_regime("requires r = 1, theta != 0");
      for (int n = 0;; ++n) {
        const double depth = (n % 2 == 1) ? -1.0 + 2.0 * (n + 1) * kPi / (kPi - at)
                                          : 1.0 + 2.0 * n * kPi / (kPi - at);
        if (depth > max_depth) break;
        out.push_back({0, n, from_ixi(depth), "exact", n == 0});
      }
      break;
    }
    case PredictionCase::R1SmallThetaF2: {
      if (std::abs(r - 1.0) > 1e-12 || at > 0.25) out_of_regime("requires r = 1, |theta| <= 0.25");
      out.push_back({1, 1, from_ixi(4.0 + 8.0 / kPi * at), "O(theta^2)", false});
      break;
    }
    case PredictionCase::RLargeSmallTheta: {
      if (!(r > 1.0) || at > 0.25) out_of_regime("requires r > 1, |theta| <= 0.25");
      for (int k = 1; k <= kmax; ++k) {
        const double im = 2.0 * r * k * (k + 1) / ((r - 1.0) * kPi) * theta * at;
        out.push_back({0, k, from_ixi({1.0 + 2.0 * k, im}), "O(theta^3)", false});
      }
      for (int k = 1; k <= kmax; ++k) {
        out.push_back({1, k, from_ixi(2.0 + 2.0 * k), "O(theta^3)", false});
      }
      break;
    }
    case PredictionCase::R1NearPiF2: {
      const double eps = kPi - at;
      if (std::abs(r - 1.0) > 1e-12 || eps > 0.3) out_of_regime("requires r = 1, pi - |theta| <= 0.3");
      out.push_back({1, 1, from_ixi(Complex(14.995, 5.537) / eps), "O(1)", false});
      out.push_back({1, 2, from_ixi(Complex(14.995, -5.537) / eps), "O(1)", false});
      break;
    }
  }
  return out;
}

}  // namespace bergman
