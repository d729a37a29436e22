#pragma once

#include "ko/entire_solutions.hpp"
#include "ko/matrixops.hpp"
#include "ko/nonlinearity.hpp"
#include "ko/radial_ode.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace ko::io {

using Json = nlohmann::json;

/// Shortest round-trippable text for a double (17 significant digits).
std::string format_double(double v);

NonlinearitySpec spec_from_json(const Json& j);
Json spec_to_json(const NonlinearitySpec& spec);

/// {"n": int, "entries": row-major n*n reals}
SymMatrix matrix_from_json(const Json& j);
Json matrix_to_json(const SymMatrix& m);

Json flags_to_json(const PropertyFlags& fl);

Json ko_to_json(const KOVerdict& v);
KOVerdict ko_from_json(const Json& j);

/// {"verdict", "ko", "radius_bound", "residual_max", "profile_csv"} plus "c" and "note".
Json certificate_to_json(const DichotomyCertificate& cert);
DichotomyCertificate certificate_from_json(const Json& j);

/// Overlays the fields present in `j` onto `base`.
ShootConfig shoot_config_from_json(const Json& j, ShootConfig base = {});
Json shoot_config_to_json(const ShootConfig& cfg);

/// Header `r,phi,dphi,ddphi`, one row per sample, then
/// `# status=<global|blowup> R_lo=<..> R_hi=<..> c=<..> a=<..>`.
void write_profile_csv(std::ostream& os, const RadialProfile& profile);
RadialProfile read_profile_csv(std::istream& is);

/// `kind,r,phi` rows: kind=profile for samples, then radius markers
/// (bound_lower, bound_upper, blowup_lo, blowup_hi) with empty phi.
void write_plot_data(std::ostream& os, const RadialProfile& profile, const RadiusBounds* bounds);

Json parse_json_file(const std::string& path);

}  // namespace ko::io
