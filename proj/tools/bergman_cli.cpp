// Command-line front end. Exit codes: 1 parse/config, 2 geometry, 3 roots,
// 4 kernel, 5 regularity.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bergman/errors.hpp"
#include "bergman/io.hpp"
#include "bergman/kernel.hpp"
#include "bergman/regularity.hpp"

using namespace bergman;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kParse = 1, kGeometry = 2, kRoots = 3, kKernel = 4, kRegularity = 5 };

struct StageError {
  int code;
  std::string message;
};

template <class Fn>
auto stage(int code, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw StageError{code, e.what()};
  } catch (const json::exception& e) {
    throw StageError{kParse, e.what()};
  }
}

struct Config {
  std::string input;
  std::optional<double> r;
  std::optional<double> theta;
  std::string format = "json";
  std::string out;
  double tol_root = 1e-10;
  double tol_series = 1e-12;
  double tol_quad = 1e-13;
  double h = 0.0;
  int jmax = -1;
  std::string p = "2";
  double epsilon = 0.1;
  std::string z;
  std::string zeta;
  std::string method = "series";
  bool symmetry = false;
  double u_min = -12.0;
  double u_max = -4.0;
  double u_step = 0.5;
  double series_depth = 0.0;
};

struct Domain {
  std::optional<ContactData> cd;
  std::optional<ProjectiveNormalization> pn;
  ModelDomain md;
};

Domain load_domain(const Config& cfg, bool need_balls) {
  Domain d;
  if (cfg.r && cfg.theta) {
    if (need_balls) throw StageError{kParse, "this command needs --input with a ball pair"};
    d.md = stage(kGeometry, [&] { return make_model_domain(*cfg.r, *cfg.theta, true); });
    return d;
  }
  if (cfg.r || cfg.theta) throw StageError{kParse, "--r and --theta must be given together"};
  if (cfg.input.empty()) throw StageError{kParse, "give --input or both --r and --theta"};
  json j;
  try {
    if (!cfg.input.empty() && cfg.input.front() == '{') {
      j = json::parse(cfg.input);
    } else {
      std::ifstream in(cfg.input);
      if (!in) throw StageError{kParse, "cannot read " + cfg.input};
      j = json::parse(in);
    }
  } catch (const json::parse_error& e) {
    throw StageError{kParse, std::string("malformed JSON: ") + e.what()};
  }
  const BallPair bp = stage(kParse, [&] { return io::parse_ball_pair(j); });
  d.cd = stage(kGeometry, [&] { return contact_data(bp); });
  d.pn = stage(kGeometry, [&] { return build_normalization(*d.cd); });
  d.md = stage(kGeometry, [&] { return model_domain(*d.cd); });
  return d;
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw StageError{kParse, "cannot write " + cfg.out};
  out << text;
}

void emit(const Config& cfg, const json& j) { emit(cfg, j.dump(2) + "\n"); }

void check_format(const Config& cfg, bool csv_ok) {
  if (cfg.format == "json") return;
  if (cfg.format == "csv" && csv_ok) return;
  throw StageError{kParse, "unsupported --format " + cfg.format + " for this command"};
}

AtlasOptions atlas_options(const Config& cfg) {
  AtlasOptions opt;
  opt.roots.newton_tol = cfg.tol_root;
  return opt;
}

RootAtlas scan(const Config& cfg, const ModelDomain& md, double h) {
  return stage(kRoots, [&] {
    if (cfg.jmax >= 0) return build_atlas(md, h, cfg.jmax, atlas_options(cfg));
    return build_atlas_auto(md, h, atlas_options(cfg));
  });
}

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInfiniteP;
  try {
    std::size_t used = 0;
    const double p = std::stod(s, &used);
    if (used == s.size() && p > 1.0) return p;
  } catch (const std::exception&) {
  }
  throw StageError{kParse, "--p must be a number > 1 or 'inf'"};
}

int cmd_analyze(const Config& cfg) {
  check_format(cfg, false);
  const Domain d = load_domain(cfg, true);
  json j = io::contact_json(*d.cd, *d.pn);
  j["model_domain"] = io::domain_json(d.md);
  emit(cfg, j);
  return kOk;
}

int cmd_roots(const Config& cfg) {
  check_format(cfg, true);
  const Domain d = load_domain(cfg, false);
  const double h = cfg.h > 0 ? cfg.h : 20.0;
  const RootAtlas atlas = scan(cfg, d.md, h);
  if (cfg.format == "csv") {
    emit(cfg, io::atlas_csv(atlas, cfg.tol_root));
  } else {
    json j = io::atlas_json(atlas, cfg.tol_root);
    const PairingReport pr = pairing_check(atlas);
    j["pairing_closed"] = pr.closed;
    emit(cfg, j);
  }
  return kOk;
}

int cmd_kernel(const Config& cfg) {
  check_format(cfg, false);
  const Domain d = load_domain(cfg, false);
  if (cfg.method != "series" && cfg.method != "expansion" && cfg.method != "both") {
    throw StageError{kParse, "--method must be series, expansion or both"};
  }
  const C2 z = stage(kParse, [&] { return io::parse_point(cfg.z); });
  const C2 zeta = stage(kParse, [&] { return io::parse_point(cfg.zeta); });

  SeriesConfig scfg;
  scfg.tol = cfg.tol_series;
  scfg.fopt.tol = cfg.tol_quad;
  std::optional<KernelExpansion> exp;
  double h = 0.0;
  if (cfg.method != "series") {
    const double target = cfg.h > 0 ? cfg.h : 8.0;
    const RootAtlas atlas = scan(cfg, d.md, target + 1.0);
    h = stage(kRoots, [&] { return choose_admissible_h(atlas, target); });
    exp = stage(kRoots, [&] { return build_expansion(atlas, h); });
  }

  auto eval = [&](const C2& x, const C2& y, bool series) -> OmegaKernel {
    return stage(kKernel, [&] {
      if (d.cd) {
        return kernel_omega(x, y, *d.cd, *d.pn,
                            series ? KernelMethod::Series : KernelMethod::Expansion, scfg,
                            exp ? &*exp : nullptr);
      }
      const ModelPoint w{x[0], x[1]};
      const ModelPoint om{y[0], y[1]};
      if (series) {
        const SeriesResult r = kernel_model(w, om, d.md, scfg);
        return OmegaKernel{r.value, r.tail_estimate};
      }
      const ValueWithBound r = kernel_expansion_eval(w, om, *exp);
      return OmegaKernel{r.value, r.error_bound};
    });
  };

  json j;
  j["coordinates"] = d.cd ? "omega" : "model";
  std::optional<OmegaKernel> ks, ke;
  if (cfg.method != "expansion") {
    ks = eval(z, zeta, true);
    j["series"] = io::measured(ks->value, ks->error_bound);
  }
  if (exp) {
    ke = eval(z, zeta, false);
    j["expansion"] = io::measured(ke->value, ke->error_bound);
    j["expansion_depth"] = io::measured(h, 0.0);
  }
  if (ks && ke) {
    j["difference"] = io::measured(std::abs(ks->value - ke->value),
                                   ks->error_bound + ke->error_bound);
  }
  if (cfg.symmetry) {
    const bool series = cfg.method != "expansion";
    const OmegaKernel a = series ? *ks : *ke;
    const OmegaKernel b = eval(zeta, z, series);
    j["symmetry_residual"] =
        io::measured(std::abs(a.value - std::conj(b.value)), a.error_bound + b.error_bound);
  }
  emit(cfg, j);
  return kOk;
}

int cmd_regularity(const Config& cfg) {
  check_format(cfg, false);
  const Domain d = load_domain(cfg, false);
  const double p = parse_p(cfg.p);
  if (d.md.theta == 0.0) throw StageError{kRegularity, "OutOfRegime: theta = 0 is not transversal"};
  const double zf = zero_free_depth(d.md);
  const double cap = std::max(64.0, zf + 1.0);
  double h = cfg.h > 0 ? cfg.h : std::max(8.0, zf + 1.0);
  RegularityReport rep;
  RootAtlas atlas;
  for (;;) {
    atlas = scan(cfg, d.md, h);
    rep = stage(kRegularity, [&] { return sobolev_report(atlas, p); });
    if (cfg.h > 0 || !rep.obstructions.empty() || h >= cap) break;
    h = std::min(2 * h, cap);
  }
  const HolderReport hol = stage(kRegularity, [&] { return holder_report(atlas, cfg.epsilon); });
  json j;
  j["domain"] = io::domain_json(d.md);
  j["sobolev"] = io::report_json(rep, cfg.tol_root);
  j["holder"] = io::holder_json(hol, cfg.tol_root);
  emit(cfg, j);
  return kOk;
}

int cmd_convergence(const Config& cfg) {
  check_format(cfg, true);
  const Domain d = load_domain(cfg, false);
  if (!(cfg.u_step > 0 && cfg.u_min < cfg.u_max)) {
    throw StageError{kParse, "need u-min < u-max and u-step > 0"};
  }
  const double target = cfg.h > 0 ? cfg.h : 8.0;
  const double deep_target = cfg.series_depth > 0 ? cfg.series_depth : target + 4.0;
  const RootAtlas deep = scan(cfg, d.md, deep_target + 1.0);
  const double h = stage(kRoots, [&] { return choose_admissible_h(deep, target); });
  const double c = stage(kRoots, [&] { return choose_admissible_h(deep, deep_target); });
  KernelExpansion exp = stage(kRoots, [&] { return build_expansion(deep, h); });
  const ModelPoint omega = hartogs_inverse(HartogsPoint{0.2, Complex(0.0, d.md.v0)});
  std::vector<double> us;
  for (double u = cfg.u_min; u <= cfg.u_max + 1e-12; u += cfg.u_step) us.push_back(u);
  const ConvergenceStudy st =
      stage(kKernel, [&] { return convergence_study(exp, deep, c, omega, us); });
  if (cfg.format == "csv") {
    emit(cfg, io::convergence_csv(st));
  } else {
    json j;
    j["expansion_depth"] = io::measured(h, 0.0);
    j["series_depth"] = io::measured(c, 0.0);
    j["slope_model"] = io::measured(st.slope_model, 0.0);
    j["slope_Dprime"] = io::measured(st.slope_Dprime, 0.0);
    j["rows"] = json::array();
    for (const auto& r : st.rows) {
      j["rows"].push_back({{"u", io::measured(r.u, 0.0)},
                           {"log_error", io::measured(r.log_error_model, 0.0)},
                           {"log_error_Dprime", io::measured(r.log_error_Dprime, 0.0)},
                           {"log_bound", io::measured(r.log_bound, 0.0)}});
    }
    emit(cfg, j);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman kernel of the intersection of two balls in C^2"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "ball pair JSON file or inline JSON");
    sub->add_option("--r", cfg.r, "model mode: radius r");
    sub->add_option("--theta", cfg.theta, "model mode: angle theta");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--tol-root", cfg.tol_root, "Newton tolerance for roots")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-series", cfg.tol_series, "series truncation tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-quad", cfg.tol_quad, "quadrature tolerance for F")
        ->check(CLI::PositiveNumber);
    sub->add_option("--jmax", cfg.jmax, "scan j = 0..jmax (default: automatic cutoff)")
        ->check(CLI::Range(0, 400));
  };

  auto* analyze = app.add_subcommand("analyze", "contact invariants and normalization");
  common(analyze);

  auto* roots = app.add_subcommand("roots", "root atlas of F_{j+1}");
  common(roots);
  roots->add_option("--h", cfg.h, "scan depth (default 20)")->check(CLI::Range(0.0, 400.0));

  auto* kernel = app.add_subcommand("kernel", "kernel value K(z, zeta)");
  common(kernel);
  kernel->add_option("--z", cfg.z, "re,im,re,im")->required();
  kernel->add_option("--zeta", cfg.zeta, "re,im,re,im")->required();
  kernel->add_option("--method", cfg.method, "series, expansion or both");
  kernel->add_option("--h", cfg.h, "expansion depth (default 8)")->check(CLI::Range(0.0, 400.0));
  kernel->add_flag("--symmetry", cfg.symmetry, "also report |K(z,zeta) - conj K(zeta,z)|");

  auto* regularity = app.add_subcommand("regularity", "Sobolev and Hoelder thresholds");
  common(regularity);
  regularity->add_option("--p", cfg.p, "exponent p > 1 or 'inf'");
  regularity->add_option("--h", cfg.h, "scan depth (default: automatic)")
      ->check(CLI::Range(0.0, 400.0));
  regularity->add_option("--epsilon", cfg.epsilon, "Hoelder order to test");

  auto* convergence = app.add_subcommand("convergence", "series minus expansion along a ray");
  common(convergence);
  convergence->add_option("--h", cfg.h, "expansion depth (default 8)")
      ->check(CLI::Range(0.0, 400.0));
  convergence->add_option("--series-depth", cfg.series_depth, "contour depth of the reference");
  convergence->add_option("--u-min", cfg.u_min);
  convergence->add_option("--u-max", cfg.u_max);
  convergence->add_option("--u-step", cfg.u_step);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParse;
  }

  try {
    if (*analyze) return cmd_analyze(cfg);
    if (*roots) return cmd_roots(cfg);
    if (*kernel) return cmd_kernel(cfg);
    if (*regularity) return cmd_regularity(cfg);
    if (*convergence) return cmd_convergence(cfg);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kParse;
}
