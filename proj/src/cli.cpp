#include "ko/cli.hpp"

#include "ko/entire_solutions.hpp"
#include "ko/error.hpp"
#include "ko/io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

namespace ko::cli {

namespace {

using io::Json;

std::shared_ptr<spdlog::logger> logger() {
    static const auto log = [] {
        auto l = spdlog::get("ko");
        if (!l) l = spdlog::stderr_color_mt("ko");
        l->set_level(spdlog::level::warn);
        if (const char* env = std::getenv("KO_LOG")) {
            const std::string s = env;
            if (s == "error") l->set_level(spdlog::level::err);
            else if (s == "warn") l->set_level(spdlog::level::warn);
            else if (s == "info") l->set_level(spdlog::level::info);
            else if (s == "debug") l->set_level(spdlog::level::debug);
        }
        return l;
    }();
    return log;
}

const CLI::Validator kCAtLeastOne(
    [](std::string& s) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v) || !(v >= 1.0)) return "c must be >= 1, got " + s;
        return {};
    },
    "c>=1");

const CLI::Validator kPositive(
    [](std::string& s) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0)) return "value must be > 0, got " + s;
        return {};
    },
    ">0");

NonlinearitySpec load_spec(const std::string& path) {
    try {
        return io::spec_from_json(io::parse_json_file(path));
    } catch (const Error& e) {
        throw UsageError("--f " + path + ": " + e.what());
    }
}

SymMatrix load_matrix(const std::string& path) {
    try {
        return io::matrix_from_json(io::parse_json_file(path));
    } catch (const Error& e) {
        throw UsageError("--matrix " + path + ": " + e.what());
    }
}

Operator make_operator(const RunConfig& cfg) {
    switch (cfg.op) {
        case OpKind::PPlus: return PPlusK{cfg.k};
        case OpKind::MPlus: return MPlus01{};
        case OpKind::MMinus: return MMinus{PucciParams(cfg.lambda, cfg.Lambda)};
    }
    return MPlus01{};
}

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::PPlus: return "pplus";
        case OpKind::MPlus: return "mplus";
        case OpKind::MMinus: return "mminus";
    }
    return "?";
}

// Writes to --out when given, otherwise to `out`.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.output_path);
    if (!f) fail(ErrorKind::Input, "cannot write \"" + cfg.output_path + "\"");
    f << text;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) fail(ErrorKind::Input, "cannot write \"" + path + "\"");
    f << text;
}

int check_expect(const RunConfig& cfg, const std::string& actual, std::ostream& err) {
    if (cfg.expect.empty() || cfg.expect == actual) return 0;
    err << "expected " << cfg.expect << ", got " << actual << '\n';
    return 1;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

Json profile_json(const RadialProfile& p) {
    Json samples = Json::array();
    for (const auto& s : p.samples) samples.push_back({s.r, s.phi, s.dphi, s.ddphi});
    return Json{{"status", to_string(p.status)},
                {"R_lo", io::format_double(p.r_lo)},
                {"R_hi", io::format_double(p.r_hi)},
                {"c", p.c},
                {"a", p.a},
                {"samples", samples}};
}

int run_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto v = classify_ko(*cfg.spec);
    Json j = io::ko_to_json(v);
    j["spec"] = cfg.spec->describe();
    j["flags"] = io::flags_to_json(validate(*cfg.spec));
    emit(cfg, out, j.dump(2) + "\n");
    return check_expect(cfg, lower(to_string(v.status)), err);
}

int run_shoot(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto prof = shoot(*cfg.spec, cfg.shoot);
    logger()->info("shoot {} c={} a={}: {} samples, status {}", cfg.spec->describe(), cfg.shoot.c,
                   cfg.shoot.a, prof.samples.size(), to_string(prof.status));
    if (cfg.format == Format::Csv) {
        std::ostringstream ss;
        io::write_profile_csv(ss, prof);
        emit(cfg, out, ss.str());
    } else {
        Json j = profile_json(prof);
        j["config"] = io::shoot_config_to_json(cfg.shoot);
        j["spec"] = cfg.spec->describe();
        emit(cfg, out, j.dump(2) + "\n");
    }
    if (!cfg.plot_path.empty()) {
        std::optional<RadiusBounds> rb;
        if (eval_f(*cfg.spec, cfg.shoot.a) > 0.0) rb = radius_bounds(*cfg.spec, cfg.shoot.a, cfg.shoot.c);
        std::ostringstream ss;
        io::write_plot_data(ss, prof, rb ? &*rb : nullptr);
        write_file(cfg.plot_path, ss.str());
    }
    return check_expect(cfg, to_string(prof.status), err);
}

int run_operator(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto op = make_operator(cfg);
    const auto value = evaluate(op, *cfg.matrix);
    Json j{{"op", op_name(cfg.op)},
           {"value", value},
           {"eigenvalues", eigenvalues(*cfg.matrix).values},
           {"matrix", io::matrix_to_json(*cfg.matrix)}};
    if (cfg.op == OpKind::PPlus) j["k"] = cfg.k;
    if (cfg.op == OpKind::MMinus) {
        j["lambda"] = cfg.lambda;
        j["Lambda"] = cfg.Lambda;
    }
    emit(cfg, out, j.dump(2) + "\n");
    return 0;
}

DichotomyOptions dichotomy_options(const RunConfig& cfg) {
    DichotomyOptions o;
    o.a = cfg.shoot.a;
    o.r_max = cfg.shoot.r_max;
    o.points = cfg.points;
    o.seed = cfg.seed;
    o.tolerance = cfg.tolerance;
    return o;
}

int run_dichotomy(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto opts = dichotomy_options(cfg);
    DichotomyCertificate cert;
    if (cfg.op == OpKind::MMinus) {
        cert = construct_pucci_inf(*cfg.spec, cfg.n, PucciParams(cfg.lambda, cfg.Lambda), opts).certificate;
    } else {
        cert = dichotomy(*cfg.spec, make_operator(cfg), cfg.n, opts);
    }
    if (!cfg.output_path.empty() && cert.profile) {
        std::ostringstream ss;
        io::write_profile_csv(ss, *cert.profile);
        write_file(cfg.output_path, ss.str());
        cert.profile_csv = cfg.output_path;
    }
    Json j = io::certificate_to_json(cert);
    j["seed"] = cfg.seed;
    j["n"] = cfg.n;
    j["op"] = op_name(cfg.op);
    out << j.dump(2) << '\n';
    return check_expect(cfg, lower(to_string(cert.verdict)), err);
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::optional<EntireCandidate> cand;
    if (cfg.op == OpKind::MMinus) {
        auto res = construct_pucci_inf(*cfg.spec, cfg.n, PucciParams(cfg.lambda, cfg.Lambda),
                                       dichotomy_options(cfg));
        if (!res.candidate) fail(ErrorKind::Hypothesis, res.certificate.note);
        cand = std::move(res.candidate);
    } else {
        ShootConfig sc = cfg.shoot;
        cand = EntireCandidate{shoot(*cfg.spec, sc), *cfg.spec, cfg.n, make_operator(cfg)};
    }
    const auto inv = check_profile_invariants(cand->profile, *cfg.spec);
    const double radius = cand->profile.r_end();
    const auto pts = random_ball_points(cfg.n, cfg.points, radius, cfg.seed);
    const auto rep = residual(*cand, pts);
    const bool sub_route = cfg.op == OpKind::MPlus && std::abs(cand->profile.c - 1.0) < 1e-15 && cfg.n > 1;
    const double measure = sub_route ? std::max(0.0, -rep.min_signed) : rep.max_abs;
    const bool passed = inv.ok && measure <= cfg.tolerance;
    Json j{{"seed", cfg.seed},
           {"points", cfg.points},
           {"radius", radius},
           {"c", cand->profile.c},
           {"status", to_string(cand->profile.status)},
           {"invariants",
            {{"ok", inv.ok},
             {"checked", inv.checked},
             {"monotone", inv.monotone},
             {"convex", inv.convex},
             {"eigen_comparison", inv.eigen_comparison},
             {"lower_second", inv.lower_second},
             {"upper_second", inv.upper_second},
             {"last", inv.last},
             {"flux", inv.flux}}},
           {"residual",
            {{"max_abs", rep.max_abs}, {"min_signed", rep.min_signed}, {"max_signed", rep.max_signed}}},
           {"measure", sub_route ? "deficit" : "abs"},
           {"passed", passed}};
    emit(cfg, out, j.dump(2) + "\n");
    return check_expect(cfg, passed ? "pass" : "fail", err);
}

struct SweepRow {
    double c = 1.0;
    double a = 0.0;
    std::string status;
    double r_lo = 0.0;
    double r_hi = 0.0;
    double bound_lower = std::numeric_limits<double>::quiet_NaN();
    double bound_upper = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    std::vector<std::pair<double, double>> jobs;
    const std::vector<double> cs = cfg.c_list.empty() ? std::vector<double>{cfg.shoot.c} : cfg.c_list;
    for (double c : cs) {
        for (std::size_t i = 0; i < cfg.a_steps; ++i) {
            const double a = cfg.a_steps == 1
                                 ? cfg.a_from
                                 : cfg.a_from + (cfg.a_to - cfg.a_from) * static_cast<double>(i) /
                                                    static_cast<double>(cfg.a_steps - 1);
            jobs.emplace_back(c, a);
        }
    }
    std::vector<SweepRow> rows(jobs.size());
    const auto count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        SweepRow& row = rows[static_cast<std::size_t>(i)];
        row.c = jobs[static_cast<std::size_t>(i)].first;
        row.a = jobs[static_cast<std::size_t>(i)].second;
        try {
            ShootConfig sc = cfg.shoot;
            sc.c = row.c;
            sc.a = row.a;
            const auto prof = shoot(*cfg.spec, sc);
            row.status = to_string(prof.status);
            row.r_lo = prof.r_lo;
            row.r_hi = prof.r_hi;
            if (eval_f(*cfg.spec, row.a) > 0.0) {
                const auto rb = radius_bounds(*cfg.spec, row.a, row.c);
                if (rb.bounded) {
                    row.bound_lower = rb.lower;
                    row.bound_upper = rb.upper;
                }
            }
        } catch (const std::exception& e) {
            row.status = "error";
            row.error = e.what();
        }
    }

    std::ostringstream ss;
    auto num = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
    if (cfg.format == Format::Csv) {
        ss << "c,a,status,R_lo,R_hi,bound_lower,bound_upper\n";
        for (const auto& r : rows) {
            ss << io::format_double(r.c) << ',' << io::format_double(r.a) << ',' << r.status << ','
               << num(r.r_lo) << ',' << num(r.r_hi) << ',' << num(r.bound_lower) << ','
               << num(r.bound_upper) << '\n';
        }
    } else {
        Json arr = Json::array();
        for (const auto& r : rows) {
            Json jr{{"c", r.c},
                    {"a", r.a},
                    {"status", r.status},
                    {"R_lo", io::format_double(r.r_lo)},
                    {"R_hi", io::format_double(r.r_hi)}};
            if (!std::isnan(r.bound_lower)) {
                jr["bound_lower"] = r.bound_lower;
                jr["bound_upper"] = r.bound_upper;
            }
            if (!r.error.empty()) jr["error"] = r.error;
            arr.push_back(jr);
        }
        ss << Json{{"spec", cfg.spec->describe()}, {"jobs", arr}}.dump(2) << '\n';
    }
    emit(cfg, out, ss.str());
    const bool any_error = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
    return any_error ? 3 : 0;
}

}  // namespace

const char* to_string(Command c) noexcept {
    switch (c) {
        case Command::Classify: return "classify";
        case Command::Shoot: return "shoot";
        case Command::Operator: return "operator";
        case Command::Dichotomy: return "dichotomy";
        case Command::Verify: return "verify";
        case Command::Sweep: return "sweep";
    }
    return "?";
}

RunConfig parse_args(const std::vector<std::string>& argv) {
    RunConfig cfg;
    CLI::App app{"Keller-Osserman dichotomy toolkit", argv.empty() ? "ko" : argv.front()};
    app.require_subcommand(1);

    std::string config_path;
    std::string format;
    std::string op = "pplus";

    auto* classify = app.add_subcommand("classify", "Keller-Osserman verdict for a nonlinearity");
    auto* shoot_cmd = app.add_subcommand("shoot", "Integrate the radial ODE");
    auto* op_cmd = app.add_subcommand("operator", "Evaluate an extremal operator on a matrix");
    auto* dich = app.add_subcommand("dichotomy", "Existence certificate for an entire subsolution");
    auto* verify = app.add_subcommand("verify", "Invariants and PDE residual of a radial candidate");
    auto* sweep = app.add_subcommand("sweep", "Shoot over lists of c and a");

    auto add_spec = [&](CLI::App* sub) {
        sub->add_option("--f", cfg.spec_path, "Nonlinearity JSON")->required();
    };
    auto add_shoot = [&](CLI::App* sub) {
        sub->add_option("--c", cfg.shoot.c, "Radial coefficient c >= 1")->check(kCAtLeastOne);
        sub->add_option("--a", cfg.shoot.a, "Initial value phi(0)");
        sub->add_option("--r-max", cfg.shoot.r_max, "Integration horizon")->check(kPositive);
        sub->add_option("--rel-tol", cfg.shoot.rel_tol, "Relative step tolerance")->check(kPositive);
        sub->add_option("--abs-tol", cfg.shoot.abs_tol, "Absolute step tolerance")->check(kPositive);
        sub->add_option("--blowup-cap", cfg.shoot.blowup_cap, "phi level that triggers bracketing")
            ->check(kPositive);
        sub->add_option("--min-step", cfg.shoot.min_step, "Relative step-collapse threshold")
            ->check(kPositive);
        sub->add_option("--config", config_path, "ShootConfig JSON (flags override it)");
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.output_path, "Output file"); };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    auto add_op = [&](CLI::App* sub, std::vector<std::string> ops) {
        sub->add_option("--op", op, "Operator")->check(CLI::IsMember(ops));
        sub->add_option("--k", cfg.k, "Partial-trace order")->check(CLI::PositiveNumber);
        sub->add_option("--lambda", cfg.lambda, "Lower ellipticity")->check(kPositive);
        sub->add_option("--Lambda", cfg.Lambda, "Upper ellipticity")->check(kPositive);
    };
    auto add_cloud = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "Space dimension")->check(CLI::PositiveNumber);
        sub->add_option("--points", cfg.points, "Number of sample points")->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "Seed for point clouds");
        sub->add_option("--tolerance", cfg.tolerance, "Residual tolerance")->check(kPositive);
    };
    auto add_expect = [&](CLI::App* sub, std::vector<std::string> values) {
        sub->add_option("--expect", cfg.expect, "Expected verdict")->check(CLI::IsMember(values));
    };

    add_spec(classify);
    add_out(classify);
    add_expect(classify, {"holds", "fails", "inconclusive"});

    add_spec(shoot_cmd);
    add_shoot(shoot_cmd);
    add_out(shoot_cmd);
    add_format(shoot_cmd);
    shoot_cmd->add_option("--plot-data", cfg.plot_path, "Plot-data CSV");
    add_expect(shoot_cmd, {"global", "blowup"});

    op_cmd->add_option("--matrix", cfg.matrix_path, "Matrix JSON")->required();
    add_op(op_cmd, {"pplus", "mplus", "mminus"});
    add_out(op_cmd);

    add_spec(dich);
    add_op(dich, {"pplus", "mplus", "mminus"});
    add_cloud(dich);
    dich->add_option("--a", cfg.shoot.a, "Initial value phi(0)");
    dich->add_option("--r-max", cfg.shoot.r_max, "Integration horizon")->check(kPositive);
    dich->add_option("--out", cfg.output_path, "Profile CSV");
    add_expect(dich, {"exists", "notexists", "inconclusive"});

    add_spec(verify);
    add_shoot(verify);
    add_op(verify, {"pplus", "mplus", "mminus"});
    add_cloud(verify);
    add_out(verify);
    add_expect(verify, {"pass", "fail"});

    add_spec(sweep);
    add_shoot(sweep);
    sweep->add_option("--c-list", cfg.c_list, "Comma-separated c values")
        ->delimiter(',')
        ->check(kCAtLeastOne);
    sweep->add_option("--a-from", cfg.a_from, "First initial value");
    sweep->add_option("--a-to", cfg.a_to, "Last initial value");
    sweep->add_option("--a-steps", cfg.a_steps, "Number of initial values")->check(CLI::PositiveNumber);
    add_out(sweep);
    add_format(sweep);

    std::vector<const char*> raw;
    raw.push_back(argv.empty() ? "ko" : argv.front().c_str());
    for (std::size_t i = 1; i < argv.size(); ++i) raw.push_back(argv[i].c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw UsageError(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    if (name == "classify") cfg.command = Command::Classify;
    else if (name == "shoot") cfg.command = Command::Shoot;
    else if (name == "operator") cfg.command = Command::Operator;
    else if (name == "dichotomy") cfg.command = Command::Dichotomy;
    else if (name == "verify") cfg.command = Command::Verify;
    else cfg.command = Command::Sweep;

    if (format.empty()) {
        const bool json_out = cfg.output_path.size() >= 5 &&
                              cfg.output_path.compare(cfg.output_path.size() - 5, 5, ".json") == 0;
        const bool tabular = cfg.command == Command::Shoot || cfg.command == Command::Sweep;
        cfg.format = tabular && !json_out ? Format::Csv : Format::Json;
    } else {
        cfg.format = format == "csv" ? Format::Csv : Format::Json;
    }
    cfg.op = op == "mplus" ? OpKind::MPlus : op == "mminus" ? OpKind::MMinus : OpKind::PPlus;

    if (!config_path.empty()) {
        // Flags given explicitly win over the file.
        ShootConfig flags = cfg.shoot;
        try {
            cfg.shoot = io::shoot_config_from_json(io::parse_json_file(config_path), ShootConfig{});
        } catch (const Error& e) {
            throw UsageError("--config " + config_path + ": " + e.what());
        }
        auto keep = [&](const char* flag, double ShootConfig::*field) {
            auto* o = chosen->get_option_no_throw(flag);
            if (o && o->count() > 0) cfg.shoot.*field = flags.*field;
        };
        keep("--c", &ShootConfig::c);
        keep("--a", &ShootConfig::a);
        keep("--r-max", &ShootConfig::r_max);
        keep("--rel-tol", &ShootConfig::rel_tol);
        keep("--abs-tol", &ShootConfig::abs_tol);
        keep("--blowup-cap", &ShootConfig::blowup_cap);
        keep("--min-step", &ShootConfig::min_step);
    }
    if (cfg.command == Command::Verify) {
        auto* copt = chosen->get_option_no_throw("--c");
        if (!copt || copt->count() == 0) {
            if (cfg.op == OpKind::PPlus) cfg.shoot.c = static_cast<double>(cfg.k);
            if (cfg.op == OpKind::MPlus) cfg.shoot.c = 1.0;
        }
    }
    try {
        cfg.shoot.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (cfg.command == Command::Sweep && cfg.a_steps > 1 && !(cfg.a_to >= cfg.a_from)) {
        throw UsageError("--a-to must be >= --a-from");
    }
    if (cfg.op == OpKind::MMinus && cfg.lambda > cfg.Lambda) {
        throw UsageError("--lambda must not exceed --Lambda");
    }

    if (!cfg.spec_path.empty()) cfg.spec = load_spec(cfg.spec_path);
    if (!cfg.matrix_path.empty()) cfg.matrix = load_matrix(cfg.matrix_path);
    if (cfg.op == OpKind::PPlus) {
        const std::size_t dim = cfg.matrix ? cfg.matrix->n() : cfg.n;
        if ((cfg.command == Command::Operator || cfg.command == Command::Dichotomy ||
             cfg.command == Command::Verify) &&
            cfg.k > dim) {
            throw UsageError("--k " + std::to_string(cfg.k) + " exceeds dimension " + std::to_string(dim));
        }
    }
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.command) {
            case Command::Classify: return run_classify(cfg, out, err);
            case Command::Shoot: return run_shoot(cfg, out, err);
            case Command::Operator: return run_operator(cfg, out, err);
            case Command::Dichotomy: return run_dichotomy(cfg, out, err);
            case Command::Verify: return run_verify(cfg, out, err);
            case Command::Sweep: return run_sweep(cfg, out, err);
        }
    } catch (const Error& e) {
        logger()->error("{} error: {}", to_string(e.kind()), e.what());
        err << to_string(cfg.command) << ": " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::Input:
            case ErrorKind::Parameter:
            case ErrorKind::Hypothesis: return 2;
            case ErrorKind::Domain:
            case ErrorKind::Integration: return 3;
        }
    }
    return 3;
}

int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_args(argv);
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return 2;
    }
    logger()->debug("running {}", to_string(cfg.command));
    return run(cfg, out, err);
}

}  // namespace ko::cli
