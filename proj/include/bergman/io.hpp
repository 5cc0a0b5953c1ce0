#pragma once

// JSON and CSV export. Every real number leaves as {"value", "bound"}; integer
// labels (j, multiplicity, counts) are exact and go out bare.

#include <string>

#include "json.hpp"

#include "bergman/geometry.hpp"
#include "bergman/kernel.hpp"
#include "bergman/model_map.hpp"
#include "bergman/regularity.hpp"
#include "bergman/roots.hpp"

namespace bergman::io {

using nlohmann::json;

/// Non-finite values are written as the strings "inf", "-inf", "nan".
json number(double x);
json measured(double value, double bound);
json measured(Complex value, double bound);

BallPair parse_ball_pair(const json& j);  // {"a": [[re, im], [re, im]], "r": r}
C2 parse_point(const std::string& text);  // "re,im,re,im"

json contact_json(const ContactData& cd, const ProjectiveNormalization& pn);
json domain_json(const ModelDomain& md);
json atlas_json(const RootAtlas& atlas, double root_tol);
std::string atlas_csv(const RootAtlas& atlas, double root_tol);
json report_json(const RegularityReport& rep, double depth_tol);
json holder_json(const HolderReport& rep, double depth_tol);
std::string convergence_csv(const ConvergenceStudy& st);

}  // namespace bergman::io
