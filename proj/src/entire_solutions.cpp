#include "ko/entire_solutions.hpp"

#include "ko/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ko {

namespace {

double norm(std::span<const double> x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

std::vector<double> random_direction(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(n);
    double len = 0.0;
    while (len < 1e-12) {
        for (double& x : v) x = gauss(rng);
        len = norm(v);
    }
    for (double& x : v) x /= len;
    return v;
}

ResidualPoint residual_at(const EntireCandidate& cand, const Point& x) {
    const double r = norm(x);
    const SymMatrix h = hessian_radial(cand.profile, x);
    const double phi = evaluate_profile(cand.profile, r).phi;
    const double op = evaluate(cand.op, h);
    const double f = eval_f(cand.spec, phi);
    return {r, op, f, op - f};
}

void check_points(const EntireCandidate& cand, std::span<const Point> points) {
    if (const auto* p = std::get_if<PPlusK>(&cand.op)) {
        if (p->k < 1 || p->k > cand.n) fail(ErrorKind::Parameter, "k outside [1, n]");
    }
    for (const auto& x : points) {
        if (x.size() != cand.n) fail(ErrorKind::Input, "point dimension does not match n");
        if (norm(x) > cand.profile.r_end()) {
            fail(ErrorKind::Domain, "point lies beyond the sampled profile range");
        }
    }
}

ResidualReport summarize(std::vector<ResidualPoint> pts) {
    ResidualReport rep;
    if (!pts.empty()) {
        rep.min_signed = std::numeric_limits<double>::infinity();
        rep.max_signed = -std::numeric_limits<double>::infinity();
    }
    for (const auto& p : pts) {
        rep.max_abs = std::max(rep.max_abs, std::abs(p.residual));
        rep.min_signed = std::min(rep.min_signed, p.residual);
        rep.max_signed = std::max(rep.max_signed, p.residual);
    }
    rep.points = std::move(pts);
    return rep;
}

std::string name_of(const Operator& op) {
    if (const auto* p = std::get_if<PPlusK>(&op)) return "P+_" + std::to_string(p->k);
    if (std::holds_alternative<MPlus01>(op)) return "M+_{0,1}";
    return "M-_{lambda,Lambda}";
}

}  // namespace

SymMatrix hessian_radial(const RadialProfile& profile, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) fail(ErrorKind::Input, "point must have at least one coordinate");
    const double r = norm(x);
    const ProfileSample s = evaluate_profile(profile, r);
    SymMatrix h = SymMatrix::zeros(n);
    if (r == 0.0) {
        for (std::size_t i = 0; i < n; ++i) h.set(i, i, s.ddphi);
        return h;
    }
    const double radial = s.dphi / r;
    const double extra = s.ddphi - radial;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = extra * (x[i] / r) * (x[j] / r) + (i == j ? radial : 0.0);
            h.set(i, j, v);
        }
    }
    return h;
}

ResidualReport residual_serial(const EntireCandidate& cand, std::span<const Point> points) {
    check_points(cand, points);
    std::vector<ResidualPoint> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = residual_at(cand, points[i]);
    return summarize(std::move(out));
}

ResidualReport residual(const EntireCandidate& cand, std::span<const Point> points) {
    check_points(cand, points);
    std::vector<ResidualPoint> out(points.size());
    const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = residual_at(cand, points[i]);
    return summarize(std::move(out));
}

bool verify_convexity_ordering(const RadialProfile& profile, double tol) {
    for (const auto& s : profile.samples) {
        if (s.r <= 0.0) continue;
        if (s.ddphi < s.dphi / s.r - tol * std::max(1.0, std::abs(s.ddphi))) return false;
    }
    return true;
}

void GridSamples::validate() const {
    if (points.size() != values.size()) fail(ErrorKind::Input, "grid points and values differ in size");
    for (const auto& p : points) {
        if (!(norm(p) < radius)) fail(ErrorKind::Input, "grid point outside the open ball B_R");
    }
}

std::vector<Point> radial_grid(std::size_t n, std::size_t count, double radius,
                               std::uint64_t seed) {
    if (n == 0) fail(ErrorKind::Parameter, "dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Point> pts;
    pts.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double r = radius * (static_cast<double>(j) + 0.5) / static_cast<double>(count);
        auto d = random_direction(n, rng);
        for (double& v : d) v *= r;
        pts.push_back(std::move(d));
    }
    return pts;
}

std::vector<Point> random_ball_points(std::size_t n, std::size_t count, double radius,
                                      std::uint64_t seed) {
    if (n == 0) fail(ErrorKind::Parameter, "dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> pts;
    pts.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        auto d = random_direction(n, rng);
        const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
        for (double& v : d) v *= r;
        pts.push_back(std::move(d));
    }
    return pts;
}

GridSamples sample_radial(const RadialProfile& profile, std::vector<Point> points, double radius) {
    GridSamples g;
    g.radius = radius;
    g.values.reserve(points.size());
    for (const auto& p : points) g.values.push_back(evaluate_profile(profile, norm(p)).phi);
    g.points = std::move(points);
    g.validate();
    return g;
}

ComparisonReport comparison_experiment(const GridSamples& u, const EntireCandidate& super) {
    u.validate();
    ComparisonReport rep;
    rep.worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.points.size(); ++i) {
        const double r = norm(u.points[i]);
        if (r > super.profile.r_end()) {
            ++rep.skipped;
            continue;
        }
        const double phi = evaluate_profile(super.profile, r).phi;
        const double excess = u.values[i] - phi;
        rep.worst_excess = std::max(rep.worst_excess, excess);
        ++rep.checked;
        if (excess > 1e-9 * std::max(1.0, std::abs(phi))) rep.violations.push_back(i);
    }
    return rep;
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Exists: return "Exists";
        case Verdict::NotExists: return "NotExists";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

DichotomyCertificate dichotomy(const NonlinearitySpec& spec, const Operator& op, std::size_t n,
                               const DichotomyOptions& opts) {
    if (n == 0) fail(ErrorKind::Parameter, "dimension must be >= 1");
    const PropertyFlags fl = validate(spec);
    double c_exist = 1.0;
    double c_bound = 1.0;
    bool subsolution_route = false;
    if (const auto* p = std::get_if<PPlusK>(&op)) {
        if (p->k < 1 || p->k > n) fail(ErrorKind::Parameter, "k outside [1, n]");
        const char* thm = " (hypothesis of the P+_k existence theorem)";
        if (!fl.positive) fail(ErrorKind::Hypothesis, spec.describe() + " is not positive" + thm);
        if (!fl.nondecreasing) {
            fail(ErrorKind::Hypothesis, spec.describe() + " is not nondecreasing" + thm);
        }
        c_exist = static_cast<double>(p->k);
        c_bound = c_exist;
    } else if (std::holds_alternative<MPlus01>(op)) {
        const char* thm = " (hypothesis of the M+_{0,1} existence theorem)";
        if (!fl.positive) fail(ErrorKind::Hypothesis, spec.describe() + " is not positive" + thm);
        if (!fl.strictly_increasing) {
            fail(ErrorKind::Hypothesis, spec.describe() + " is not strictly_increasing" + thm);
        }
        // c = 1 profile is a subsolution; the blow-up comparison profile solves
        // phi'' + (n-1) phi'/r = f.
        c_exist = 1.0;
        c_bound = static_cast<double>(n);
        subsolution_route = true;
    } else {
        fail(ErrorKind::Parameter, "dichotomy supports P+_k and M+_{0,1}; use construct_pucci_inf");
    }

    DichotomyCertificate cert;
    cert.ko = classify_ko(spec);
    switch (cert.ko.status) {
        case KOStatus::Inconclusive:
            cert.verdict = Verdict::Inconclusive;
            cert.note = "Keller-Osserman verdict inconclusive";
            return cert;
        case KOStatus::Fails: {
            cert.c = c_bound;
            const RadiusBounds rb = radius_bounds(spec, opts.a, c_bound);
            if (!rb.bounded) {
                cert.verdict = Verdict::Inconclusive;
                cert.note = "radius bound did not converge";
                return cert;
            }
            cert.verdict = Verdict::NotExists;
            cert.radius_bound = rb.upper;
            cert.note = "radial comparison solution with phi(0)=" + std::to_string(opts.a) +
                        " blows up before r=" + std::to_string(rb.upper);
            return cert;
        }
        case KOStatus::Holds: break;
    }

    cert.c = c_exist;
    ShootConfig cfg;
    cfg.c = c_exist;
    cfg.a = opts.a;
    cfg.r_max = opts.r_max;
    RadialProfile prof = shoot(spec, cfg);
    if (prof.status != ProfileStatus::Global) {
        cert.verdict = Verdict::Inconclusive;
        cert.note = "profile blew up although the Keller-Osserman condition holds";
        return cert;
    }
    EntireCandidate cand{prof, spec, n, op};
    const auto pts = random_ball_points(n, opts.points, prof.r_end(), opts.seed);
    const ResidualReport rep = residual(cand, pts);
    const double worst = subsolution_route ? std::max(0.0, -rep.min_signed) : rep.max_abs;
    cert.residual_max = worst;
    cert.profile = std::move(prof);
    if (worst <= opts.tolerance) {
        cert.verdict = Verdict::Exists;
        cert.note = "global radial profile verified for " + name_of(op);
    } else {
        cert.verdict = Verdict::Inconclusive;
        cert.note = "residual exceeds tolerance";
    }
    return cert;
}

PucciInfResult construct_pucci_inf(const NonlinearitySpec& spec, std::size_t n,
                                   const PucciParams& params, const DichotomyOptions& opts) {
    if (n == 0) fail(ErrorKind::Parameter, "dimension must be >= 1");
    PucciInfResult out;
    out.dimension_condition =
        static_cast<double>(n) <= 1.0 + params.lambda_hi() / params.lambda_lo();
    const NonlinearitySpec reduced = scaled(spec, 1.0 / params.lambda_lo());
    const double c = static_cast<double>(n);

    DichotomyCertificate& cert = out.certificate;
    cert.c = c;
    cert.ko = classify_ko(spec);
    if (cert.ko.status == KOStatus::Inconclusive) {
        cert.verdict = Verdict::Inconclusive;
        cert.note = "Keller-Osserman verdict inconclusive";
        return out;
    }
    if (cert.ko.status == KOStatus::Fails) {
        const RadiusBounds rb = radius_bounds(reduced, opts.a, c);
        cert.verdict = rb.bounded ? Verdict::NotExists : Verdict::Inconclusive;
        if (rb.bounded) cert.radius_bound = rb.upper;
        cert.note = out.dimension_condition
                        ? "n <= 1 + Lambda/lambda: non-existence of non-constant solutions"
                        : "n > 1 + Lambda/lambda: KO failure is not known to preclude solutions";
        return out;
    }

    ShootConfig cfg;
    cfg.c = c;
    cfg.a = opts.a;
    cfg.r_max = opts.r_max;
    RadialProfile prof = shoot(reduced, cfg);
    if (prof.status != ProfileStatus::Global) {
        cert.verdict = Verdict::Inconclusive;
        cert.note = "profile blew up although the Keller-Osserman condition holds";
        return out;
    }
    EntireCandidate cand{prof, spec, n, MMinus{params}};
    const auto pts = random_ball_points(n, opts.points, prof.r_end(), opts.seed);
    ResidualReport rep = residual(cand, pts);
    cert.residual_max = rep.max_abs;
    cert.profile = prof;
    cert.verdict = rep.max_abs <= opts.tolerance ? Verdict::Exists : Verdict::Inconclusive;
    cert.note = "radial solution of lambda (phi'' + (n-1) phi'/r) = f(phi)";
    out.candidate = std::move(cand);
    out.residual = std::move(rep);
    return out;
}

}  // namespace ko
