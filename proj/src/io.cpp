#include "ko/io.hpp"

#include "ko/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ko::io {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double number_field(const Json& j, const char* key) {
    if (!j.contains(key)) fail(ErrorKind::Input, std::string("missing field \"") + key + "\"");
    const Json& v = j.at(key);
    if (!v.is_number()) fail(ErrorKind::Input, std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? number_field(j, key) : fallback;
}

// JSON has no infinity; null stands in for it.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
double null_as_inf(const Json& v) { return v.is_null() ? kInf : v.get<double>(); }

double parse_double(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        fail(ErrorKind::Input, "malformed number \"" + s + "\"");
    }
    return v;
}

KOStatus status_from(const std::string& s) {
    if (s == "Holds") return KOStatus::Holds;
    if (s == "Fails") return KOStatus::Fails;
    if (s == "Inconclusive") return KOStatus::Inconclusive;
    fail(ErrorKind::Input, "unknown KO status \"" + s + "\"");
}

}  // namespace

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

NonlinearitySpec spec_from_json(const Json& j) {
    if (!j.is_object()) fail(ErrorKind::Input, "nonlinearity spec must be a JSON object");
    if (!j.contains("family") || !j.at("family").is_string()) {
        fail(ErrorKind::Input, "nonlinearity spec needs a string \"family\"");
    }
    const std::string fam = j.at("family").get<std::string>();
    auto base = [&] {
        if (!j.contains("base")) fail(ErrorKind::Input, "family \"" + fam + "\" needs a \"base\" spec");
        return spec_from_json(j.at("base"));
    };
    if (fam == "power_plus_eps") {
        return NonlinearitySpec::power_plus_eps(number_field(j, "gamma"), number_field(j, "eps"));
    }
    if (fam == "exponential") return NonlinearitySpec::exponential(number_or(j, "scale", 1.0));
    if (fam == "affine") {
        std::optional<double> cut;
        if (j.contains("t_cut")) cut = number_field(j, "t_cut");
        return NonlinearitySpec::affine(number_field(j, "slope"), number_field(j, "offset"), cut);
    }
    if (fam == "constant") return NonlinearitySpec::constant(number_field(j, "value"));
    if (fam == "tabulated") {
        if (!j.contains("knots") || !j.at("knots").is_array()) {
            fail(ErrorKind::Input, "tabulated spec needs a \"knots\" array");
        }
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : j.at("knots")) {
            if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
                fail(ErrorKind::Input, "each knot must be a [t, f] pair of numbers");
            }
            knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
        return NonlinearitySpec::tabulated(std::move(knots));
    }
    if (fam == "truncated_below") {
        TruncationOptions opts;
        opts.span = number_or(j, "span", opts.span);
        opts.cells = static_cast<std::size_t>(number_or(j, "cells", static_cast<double>(opts.cells)));
        return truncate_below(base(), number_field(j, "t0"), opts);
    }
    if (fam == "odd_extension") return odd_extension(base(), number_field(j, "t0"));
    if (fam == "scaled") return scaled(base(), number_field(j, "factor"));
    fail(ErrorKind::Input, "unknown nonlinearity family \"" + fam + "\"");
}

Json spec_to_json(const NonlinearitySpec& spec) {
    const auto& v = spec.variant();
    Json j;
    j["family"] = spec.family_name();
    if (const auto* p = std::get_if<family::PowerPlusEps>(&v)) {
        j["gamma"] = p->gamma;
        j["eps"] = p->eps;
    } else if (const auto* e = std::get_if<family::Exponential>(&v)) {
        j["scale"] = e->scale;
    } else if (const auto* a = std::get_if<family::Affine>(&v)) {
        j["slope"] = a->slope;
        j["offset"] = a->offset;
        if (a->t_cut_explicit) j["t_cut"] = a->t_cut;
    } else if (const auto* c = std::get_if<family::Constant>(&v)) {
        j["value"] = c->value;
    } else if (const auto* t = std::get_if<family::Tabulated>(&v)) {
        Json knots = Json::array();
        for (const auto& [x, y] : t->knots) knots.push_back({x, y});
        j["knots"] = knots;
    } else if (const auto* tr = std::get_if<family::TruncatedBelow>(&v)) {
        j["base"] = spec_to_json(tr->base);
        j["t0"] = tr->t0;
        j["span"] = tr->t0 - tr->t_min;
        j["cells"] = tr->running_min.size() - 1;
    } else if (const auto* od = std::get_if<family::OddExtension>(&v)) {
        j["base"] = spec_to_json(od->base);
        j["t0"] = od->t0;
    } else if (const auto* s = std::get_if<family::Scaled>(&v)) {
        j["base"] = spec_to_json(s->base);
        j["factor"] = s->factor;
    } else {
        fail(ErrorKind::Input, "custom nonlinearities cannot be serialized");
    }
    return j;
}

SymMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("n") || !j.at("n").is_number_integer()) {
        fail(ErrorKind::Input, "matrix JSON needs an integer \"n\"");
    }
    const auto n = j.at("n").get<long long>();
    if (n < 1) fail(ErrorKind::Input, "matrix dimension must be >= 1");
    if (!j.contains("entries") || !j.at("entries").is_array()) {
        fail(ErrorKind::Input, "matrix JSON needs an \"entries\" array");
    }
    std::vector<double> entries;
    for (const auto& e : j.at("entries")) {
        if (!e.is_number()) fail(ErrorKind::Input, "matrix entries must be numbers");
        entries.push_back(e.get<double>());
    }
    return SymMatrix::from_row_major(static_cast<std::size_t>(n), entries);
}

Json matrix_to_json(const SymMatrix& m) {
    return Json{{"n", m.n()},
                {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

Json flags_to_json(const PropertyFlags& fl) {
    return Json{{"positive", fl.positive},
                {"nonnegative", fl.nonnegative},
                {"nondecreasing", fl.nondecreasing},
                {"strictly_increasing", fl.strictly_increasing},
                {"convex_on_positives", fl.convex_on_positives},
                {"convex", fl.convex},
                {"sampled", fl.sampled}};
}

Json ko_to_json(const KOVerdict& v) {
    Json ev = Json::object();
    for (const auto& [k, x] : v.evidence) ev[k] = finite_or_null(x);
    Json ladder = Json::array();
    for (const auto& [t, i] : v.ladder) ladder.push_back({t, finite_or_null(i)});
    return Json{{"status", to_string(v.status)},
                {"method", to_string(v.method)},
                {"evidence", ev},
                {"ladder", ladder}};
}

KOVerdict ko_from_json(const Json& j) {
    KOVerdict v;
    v.status = status_from(j.at("status").get<std::string>());
    const std::string m = j.at("method").get<std::string>();
    if (m == "Analytic") v.method = KOMethod::Analytic;
    else if (m == "NumericalExtrapolation") v.method = KOMethod::NumericalExtrapolation;
    else fail(ErrorKind::Input, "unknown KO method \"" + m + "\"");
    if (j.contains("evidence")) {
        for (const auto& [k, x] : j.at("evidence").items()) v.evidence[k] = null_as_inf(x);
    }
    if (j.contains("ladder")) {
        for (const auto& p : j.at("ladder")) v.ladder.emplace_back(p[0].get<double>(), null_as_inf(p[1]));
    }
    return v;
}

Json certificate_to_json(const DichotomyCertificate& cert) {
    Json j;
    j["verdict"] = to_string(cert.verdict);
    j["ko"] = ko_to_json(cert.ko);
    j["radius_bound"] = cert.radius_bound ? finite_or_null(*cert.radius_bound) : Json(nullptr);
    j["residual_max"] = cert.residual_max ? Json(*cert.residual_max) : Json(nullptr);
    j["profile_csv"] = cert.profile_csv ? Json(*cert.profile_csv) : Json(nullptr);
    j["c"] = cert.c;
    j["note"] = cert.note;
    return j;
}

DichotomyCertificate certificate_from_json(const Json& j) {
    DichotomyCertificate cert;
    const std::string v = j.at("verdict").get<std::string>();
    if (v == "Exists") cert.verdict = Verdict::Exists;
    else if (v == "NotExists") cert.verdict = Verdict::NotExists;
    else if (v == "Inconclusive") cert.verdict = Verdict::Inconclusive;
    else fail(ErrorKind::Input, "unknown verdict \"" + v + "\"");
    cert.ko = ko_from_json(j.at("ko"));
    if (!j.at("radius_bound").is_null()) cert.radius_bound = j.at("radius_bound").get<double>();
    if (!j.at("residual_max").is_null()) cert.residual_max = j.at("residual_max").get<double>();
    if (!j.at("profile_csv").is_null()) cert.profile_csv = j.at("profile_csv").get<std::string>();
    cert.c = j.value("c", 1.0);
    cert.note = j.value("note", std::string());
    return cert;
}

ShootConfig shoot_config_from_json(const Json& j, ShootConfig base) {
    if (!j.is_object()) fail(ErrorKind::Input, "shoot config must be a JSON object");
    base.c = number_or(j, "c", base.c);
    base.a = number_or(j, "a", base.a);
    base.r_max = number_or(j, "r_max", base.r_max);
    base.rel_tol = number_or(j, "rel_tol", base.rel_tol);
    base.abs_tol = number_or(j, "abs_tol", base.abs_tol);
    base.blowup_cap = number_or(j, "blowup_cap", base.blowup_cap);
    base.min_step = number_or(j, "min_step", base.min_step);
    return base;
}

Json shoot_config_to_json(const ShootConfig& cfg) {
    return Json{{"c", cfg.c},           {"a", cfg.a},
                {"r_max", cfg.r_max},   {"rel_tol", cfg.rel_tol},
                {"abs_tol", cfg.abs_tol}, {"blowup_cap", cfg.blowup_cap},
                {"min_step", cfg.min_step}};
}

void write_profile_csv(std::ostream& os, const RadialProfile& profile) {
    os << "r,phi,dphi,ddphi\n";
    for (const auto& s : profile.samples) {
        os << format_double(s.r) << ',' << format_double(s.phi) << ',' << format_double(s.dphi)
           << ',' << format_double(s.ddphi) << '\n';
    }
    os << "# status=" << to_string(profile.status) << " R_lo=" << format_double(profile.r_lo)
       << " R_hi=" << format_double(profile.r_hi) << " c=" << format_double(profile.c)
       << " a=" << format_double(profile.a) << '\n';
}

RadialProfile read_profile_csv(std::istream& is) {
    RadialProfile prof;
    std::string line;
    if (!std::getline(is, line) || line != "r,phi,dphi,ddphi") {
        fail(ErrorKind::Input, "profile CSV must start with header r,phi,dphi,ddphi");
    }
    bool have_status = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) fail(ErrorKind::Input, "malformed trailer token \"" + tok + "\"");
                const std::string key = tok.substr(0, eq);
                const std::string val = tok.substr(eq + 1);
                if (key == "status") {
                    if (val == "global") prof.status = ProfileStatus::Global;
                    else if (val == "blowup") prof.status = ProfileStatus::BlowUp;
                    else fail(ErrorKind::Input, "unknown status \"" + val + "\"");
                    have_status = true;
                } else if (key == "R_lo") {
                    prof.r_lo = parse_double(val);
                } else if (key == "R_hi") {
                    prof.r_hi = parse_double(val);
                } else if (key == "c") {
                    prof.c = parse_double(val);
                } else if (key == "a") {
                    prof.a = parse_double(val);
                }
            }
            continue;
        }
        std::array<double, 4> v{};
        std::size_t start = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto comma = line.find(',', start);
            if ((i < 3) == (comma == std::string::npos)) {
                fail(ErrorKind::Input, "profile row needs 4 columns: \"" + line + "\"");
            }
            v[i] = parse_double(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            start = comma + 1;
        }
        if (!prof.samples.empty() && !(v[0] > prof.samples.back().r)) {
            fail(ErrorKind::Input, "profile radii must be strictly increasing");
        }
        prof.samples.push_back({v[0], v[1], v[2], v[3]});
    }
    if (prof.samples.empty()) fail(ErrorKind::Input, "profile CSV has no samples");
    if (!have_status) fail(ErrorKind::Input, "profile CSV lacks the status trailer");
    return prof;
}

void write_plot_data(std::ostream& os, const RadialProfile& profile, const RadiusBounds* bounds) {
    os << "kind,r,phi\n";
    for (const auto& s : profile.samples) {
        os << "profile," << format_double(s.r) << ',' << format_double(s.phi) << '\n';
    }
    if (bounds && bounds->bounded) {
        os << "bound_lower," << format_double(bounds->lower) << ",\n";
        os << "bound_upper," << format_double(bounds->upper) << ",\n";
    }
    if (profile.status == ProfileStatus::BlowUp) {
        os << "blowup_lo," << format_double(profile.r_lo) << ",\n";
        os << "blowup_hi," << format_double(profile.r_hi) << ",\n";
    }
}

Json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Input, "cannot open \"" + path + "\"");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Input, "malformed JSON in \"" + path + "\": " + e.what());
    }
}

}  // namespace ko::io
