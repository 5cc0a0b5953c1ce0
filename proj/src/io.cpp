#include "bergman/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman::io {
namespace {

constexpr double kEps = 2.220446049250313e-16;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json roots_json(const std::vector<Root>& roots, double tol) {
  json out = json::array();
  for (const Root& r : roots) {
    out.push_back({{"xi", measured(r.xi, tol)}, {"multiplicity", r.multiplicity}});
  }
  return out;
}

}  // namespace

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json measured(double value, double bound) {
  return {{"value", number(value)}, {"bound", number(bound)}};
}

json measured(Complex value, double bound) {
  return {{"re", number(value.real())}, {"im", number(value.imag())}, {"bound", number(bound)}};
}

BallPair parse_ball_pair(const json& j) {
  try {
    const auto& a = j.at("a");
    if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::InvalidArgument, "a needs two entries");
    auto cx = [](const json& e) {
      if (e.is_number()) return Complex(e.get<double>(), 0.0);
      return Complex(e.at(0).get<double>(), e.at(1).get<double>());
    };
    return {cx(a[0]), cx(a[1]), j.at("r").get<double>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("domain description: ") + e.what());
  }
}

C2 parse_point(const std::string& text) {
  std::stringstream ss(text);
  std::string tok;
  double v[4];
  int n = 0;
  while (std::getline(ss, tok, ',')) {
    if (n == 4) throw Error(ErrorCode::InvalidArgument, "point must be re,im,re,im");
    std::size_t used = 0;
    try {
      v[n] = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw Error(ErrorCode::InvalidArgument, "bad point component '" + tok + "'");
    ++n;
  }
  if (n != 4) {
    throw Error(ErrorCode::InvalidArgument, "point must be re,im,re,im");
  }
  return {Complex(v[0], v[1]), Complex(v[2], v[3])};
}

json contact_json(const ContactData& cd, const ProjectiveNormalization& pn) {
  const TangencyResiduals res = tangency_residuals(cd);
  const double pt = std::max({res.sphere1, res.sphere2, 4 * kEps});
  const double ang = std::max(res.angle_identity, 4 * kEps);
  json j;
  j["rho"] = measured(cd.rho, 4 * kEps * cd.rho);
  j["chi"] = measured(cd.chi, ang);
  j["theta"] = measured(cd.theta, ang);
  j["p"] = {measured(cd.p[0], pt), measured(cd.p[1], pt)};
  j["q"] = {measured(cd.q[0], pt), measured(cd.q[1], pt)};
  const double phi_err = std::abs(pn.phi - pn.phi_closed);
  j["phi"] = measured(pn.phi, std::max(phi_err, 4 * kEps));
  // Residuals are themselves error measures; their bound is rounding.
  j["residuals"] = {{"sphere1", measured(res.sphere1, 4 * kEps)},
                    {"sphere2", measured(res.sphere2, 4 * kEps)},
                    {"dependence", measured(res.dependence, 4 * kEps)},
                    {"angle_identity", measured(res.angle_identity, 4 * kEps)},
                    {"phi_closed_form", measured(phi_err, 4 * kEps)}};
  j["normalization_swapped"] = pn.swapped;
  return j;
}

json domain_json(const ModelDomain& md) {
  const double e = 4 * kEps;
  return {{"r", measured(md.r, 0.0)},
          {"theta", measured(md.theta, 0.0)},
          {"v_min", measured(md.v_min, e)},
          {"v_max", measured(md.v_max, e)},
          {"v0", measured(md.v0, e)},
          {"zero_free_depth", measured(md.theta == 0.0 ? 0.0 : kPi / md.length(), e)}};
}

json atlas_json(const RootAtlas& atlas, double root_tol) {
  json j;
  j["domain"] = domain_json(atlas.md);
  j["depth"] = measured(atlas.h, 0.0);
  j["jmax_scanned"] = atlas.jmax_scanned;
  j["cutoff_certified"] = atlas.cutoff_certified;
  j["entries"] = json::array();
  for (const auto& e : atlas.entries) {
    j["entries"].push_back({{"j", e.j},
                            {"re_window", measured(e.re_window, 0.0)},
                            {"roots", roots_json(e.roots, root_tol)}});
  }
  return j;
}

std::string atlas_csv(const RootAtlas& atlas, double root_tol) {
  std::string out = "j,re_xi,im_xi,multiplicity,bound\n";
  for (const auto& e : atlas.entries) {
    for (const Root& r : e.roots) {
      out += std::to_string(e.j) + "," + fmt(r.xi.real()) + "," + fmt(r.xi.imag()) + "," +
             std::to_string(r.multiplicity) + "," + fmt(root_tol) + "\n";
    }
  }
  return out;
}

json report_json(const RegularityReport& rep, double depth_tol) {
  json j;
  j["h_star"] = measured(rep.h_star, depth_tol);
  j["h_zero_free"] = measured(rep.h_zero_free, depth_tol);
  j["p"] = measured(rep.p, 0.0);
  j["s_positive"] = measured(rep.s_positive, depth_tol / 2);
  j["s_negative"] = measured(rep.s_negative, depth_tol / 2);
  j["scanned_depth"] = measured(rep.scanned_depth, 0.0);
  j["very_regular"] = rep.very_regular;
  j["obstructions"] = json::array();
  for (const auto& o : rep.obstructions) {
    j["obstructions"].push_back({{"j", o.j},
                                 {"xi", measured(o.xi, depth_tol)},
                                 {"multiplicity", o.multiplicity},
                                 {"reason", o.reason}});
  }
  j["caveats"] = rep.caveats;
  return j;
}

json holder_json(const HolderReport& rep, double depth_tol) {
  return {{"h_star", measured(rep.h_star, depth_tol)},
          {"exclusion_order", measured(rep.exclusion_order, depth_tol / 2)},
          {"epsilon", measured(rep.epsilon, 0.0)},
          {"arbitrarily_small", rep.arbitrarily_small},
          {"caveats", rep.caveats}};
}

std::string convergence_csv(const ConvergenceStudy& st) {
  std::string out = "# slope_model=" + fmt(st.slope_model) + " slope_Dprime=" +
                    fmt(st.slope_Dprime) + "\n";
  out += "u,log_error,log_error_Dprime,log_bound\n";
  for (const auto& r : st.rows) {
    out += fmt(r.u) + "," + fmt(r.log_error_model) + "," + fmt(r.log_error_Dprime) + "," +
           fmt(r.log_bound) + "\n";
  }
  return out;
}

}  // namespace bergman::io
