// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "ko/entire_solutions.hpp"
#include "ko/matrixops.hpp"
#include "ko/nonlinearity.hpp"
#include "ko/radial_ode.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace ko;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "first failure: " << what << "; ";
            pass = false;
        }
    }
};

ShootConfig config(double c, double a, double r_max = 10.0) {
    ShootConfig cfg;
    cfg.c = c;
    cfg.a = a;
    cfg.r_max = r_max;
    return cfg;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void blowup_radius_oracle(Outcome& o) {
    // phi(r) = -2 ln cos(r / sqrt 2) must satisfy phi'' = e^phi before it is trusted.
    auto phi = [](double r) { return -2.0 * std::log(std::cos(r / std::sqrt(2.0))); };
    double sub = 0.0;
    for (double r = 0.1; r < 2.2; r += 0.1) {
        const double d2 = 1.0 / std::pow(std::cos(r / std::sqrt(2.0)), 2);  // exact second derivative
        sub = std::max(sub, std::abs(d2 - std::exp(phi(r))) / d2);
    }
    o.require(sub < 1e-12, "closed form fails substitution");
    const double target = std::acos(-1.0) / std::sqrt(2.0);
    o.require(std::abs(target - test::frozen::kPiOverSqrt2) < 1e-15, "frozen pi/sqrt2");

    const auto t0 = std::chrono::steady_clock::now();
    const auto p = shoot(NonlinearitySpec::exponential(), config(1, 0));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(p.status == ProfileStatus::BlowUp, "status is not BlowUp");
    const double r = 0.5 * (p.r_lo + p.r_hi);
    const double err = std::abs(r - target);
    o.require(err <= 1e-6, "radius error " + num(err));
    o.require(secs < 1.0, "runtime " + num(secs) + " s");
    o.detail << "R=" << num(r) << " |R-pi/sqrt2|=" << num(err) << " runtime=" << num(secs) << "s";
}

void exact_profile(Outcome& o) {
    double worst = 0.0;
    for (double eps : {0.1, 1.0}) {
        for (double c : {1.0, 2.0, 3.0}) {
            for (double a : {0.0, 5.0}) {
                const auto p = shoot(NonlinearitySpec::constant(eps), config(c, a));
                o.require(p.status == ProfileStatus::Global, "profile not global");
                o.require(p.r_end() >= 10.0, "profile ends before r=10");
                auto exact = [&](double r) { return a + eps * r * r / (2.0 * c); };
                for (const auto& s : p.samples) worst = std::max(worst, std::abs(s.phi - exact(s.r)));
                for (int i = 0; i <= 1000; ++i) {
                    const double r = 0.01 * i;
                    worst = std::max(worst, std::abs(evaluate_profile(p, r).phi - exact(r)));
                }
            }
        }
    }
    o.require(worst <= 1e-9, "max abs error " + num(worst));
    o.detail << "12 profiles, max abs error " << num(worst);
}

void ko_table(Outcome& o) {
    struct Row {
        NonlinearitySpec spec;
        KOStatus expected;
    };
    const std::vector<Row> rows{
        {NonlinearitySpec::power_plus_eps(0.5, 1), KOStatus::Holds},
        {NonlinearitySpec::power_plus_eps(1, 1), KOStatus::Holds},
        {NonlinearitySpec::power_plus_eps(1.5, 1), KOStatus::Fails},
        {NonlinearitySpec::power_plus_eps(2, 1), KOStatus::Fails},
        {NonlinearitySpec::power_plus_eps(3, 1), KOStatus::Fails},
        {NonlinearitySpec::exponential(), KOStatus::Fails},
        {NonlinearitySpec::constant(1), KOStatus::Holds},
        {NonlinearitySpec::affine(1, 1), KOStatus::Holds},
    };
    int conclusive = 0;
    for (const auto& row : rows) {
        const auto v = classify_ko(row.spec);
        o.require(v.status == row.expected, row.spec.describe() + " -> " + to_string(v.status));
        const auto n = classify_ko_numerical(row.spec);
        if (n.status != KOStatus::Inconclusive) {
            ++conclusive;
            o.require(n.status == v.status, "numerical disagrees on " + row.spec.describe());
        }
    }
    o.detail << rows.size() << " specs, numerical path conclusive on " << conclusive << " and agreeing";
}

void sandwich(Outcome& o) {
    int configs = 0;
    double worst_oracle = 0.0;
    double worst_c1 = 0.0;
    for (double g : {1.5, 2.0, 3.0}) {
        for (double eps : {0.1, 1.0}) {
            for (double a : {0.0, 1.0}) {
                const auto f = NonlinearitySpec::power_plus_eps(g, eps);
                const auto rb1 = radius_bounds(f, a, 1.0);
                for (const auto& row : test::frozen::kLowerBounds) {
                    if (row.gamma == g && row.eps == eps && row.a == a) {
                        worst_oracle = std::max(worst_oracle, std::abs(rb1.lower - row.lower) / row.lower);
                    }
                }
                for (double c : {1.0, 2.0, 4.0}) {
                    ++configs;
                    const auto est = estimate_blowup_radius(f, config(c, a));
                    const std::string tag = f.describe() + " c=" + num(c) + " a=" + num(a);
                    o.require(est.status == ProfileStatus::BlowUp, tag + " not BlowUp");
                    o.require(est.bounds.bounded, tag + " unbounded");
                    const double lower = est.bounds.lower;
                    o.require(est.radius >= lower - 1e-6, tag + " below lower bound");
                    o.require(est.radius <= std::sqrt(c) * lower + 1e-6, tag + " above upper bound");
                    if (c == 1.0) {
                        const double d = std::abs(est.radius - energy_radius_c1(f, a));
                        worst_c1 = std::max(worst_c1, d);
                        o.require(d <= 1e-6, tag + " energy radius gap " + num(d));
                    }
                }
            }
        }
    }
    o.require(worst_oracle <= 1e-9, "lower bound vs frozen oracle " + num(worst_oracle));
    o.detail << configs << " configurations, worst c=1 gap " << num(worst_c1)
             << ", lower-bound rel. error vs oracle " << num(worst_oracle);
}

void operator_suite(Outcome& o) {
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> ut(0.0, 10.0);
    const PucciParams pucci(0.5, 2.0);
    long checks = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto x = test::random_symmetric(rng, 5, -10.0, 10.0);
        const auto y = test::random_psd(rng, 5);
        const double tol = 1e-9 * std::max(1.0, x.frobenius_norm() + y.frobenius_norm());
        const double m = mplus_01(x);
        const double my = mplus_01(x + y);
        o.require(my - m >= -tol && my - m <= y.trace() + tol, "ellipticity mplus");
        const double s = ut(rng);
        o.require(std::abs(mplus_01(x.scaled(s)) - s * m) <= (1 + s) * tol, "homogeneity mplus");
        o.require(std::abs(mminus(x.scaled(s), pucci) - s * mminus(x, pucci)) <= (1 + s) * tol,
                  "homogeneity mminus");
        o.require(mminus(x, pucci) <= mminus(x + y, pucci) + tol, "mminus monotone");
        for (std::size_t k = 1; k <= 5; ++k) {
            const double p = pplus_k(x, k);
            o.require(p <= m + tol, "pplus_k <= mplus_01");
            const double d = pplus_k(x + y, k) - p;
            o.require(d >= -tol && d <= y.trace() + tol, "ellipticity pplus_k");
            o.require(std::abs(pplus_k(x.scaled(s), k) - s * p) <= (1 + s) * tol, "homogeneity pplus_k");
            o.require(subspace_trace(x, test::random_frame(rng, 5, k)) <= p + tol, "frame supremum");
            checks += 4;
        }
        o.require(std::abs(pplus_k(x, 5) - x.trace()) <= tol, "pplus_n = trace");
        checks += 6;
    }
    o.detail << "10000 matrices, " << checks << " inequalities";
}

void invariant_sweep(Outcome& o) {
    std::vector<NonlinearitySpec> specs;
    for (double g : {0.5, 1.0, 1.5, 2.0, 3.0})
        for (double eps : {0.1, 1.0}) specs.push_back(NonlinearitySpec::power_plus_eps(g, eps));
    specs.push_back(NonlinearitySpec::exponential());
    specs.push_back(NonlinearitySpec::constant(1));
    specs.push_back(NonlinearitySpec::affine(1, 1));
    specs.push_back(NonlinearitySpec::tabulated({{-1, 0.5}, {0, 1}, {2, 4}}));
    specs.push_back(truncate_below(
        NonlinearitySpec::custom([](double t) { return (t - 1) * (t - 1) + 0.5; }, "parabola"), 2.0));
    int profiles = 0;
    std::size_t samples = 0;
    for (const auto& f : specs) {
        for (double c : {1.0, 2.0, 3.0, 5.0}) {
            for (double a : {-2.0, 0.0, 1.0}) {
                const auto p = shoot(f, config(c, a));
                const auto rep = check_profile_invariants(p, f, 1e-9);
                o.require(rep.ok, f.describe() + " c=" + num(c) + " a=" + num(a));
                ++profiles;
                samples += rep.checked;
            }
        }
    }
    o.detail << profiles << " profiles, " << samples << " samples";
}

void pde_residual(Outcome& o) {
    DichotomyOptions opts;
    opts.points = 1000;
    const auto c = dichotomy(NonlinearitySpec::constant(1), PPlusK{2}, 3, opts);
    o.require(c.verdict == Verdict::Exists, "constant verdict");
    const double rc = c.residual_max.value_or(INFINITY);
    o.require(rc <= 1e-10, "constant residual " + num(rc));

    const auto a = dichotomy(NonlinearitySpec::affine(1, 1), PPlusK{2}, 3, opts);
    o.require(a.verdict == Verdict::Exists, "affine verdict");
    o.require(a.c == 2.0, "affine profile c");
    const double ra = a.residual_max.value_or(INFINITY);
    o.require(ra <= 1e-6, "affine residual " + num(ra));

    // Independent cloud over the full ball of radius 10.
    const auto f = NonlinearitySpec::affine(1, 1);
    const EntireCandidate cand{shoot(f, config(2, 0)), f, 3, PPlusK{2}};
    const double rb = residual(cand, random_ball_points(3, 1000, 10.0, 77)).max_abs;
    o.require(rb <= 1e-6, "affine ball residual " + num(rb));
    o.detail << "constant " << num(rc) << ", affine " << num(ra) << " (ball r<=10: " << num(rb) << ")";
}

void dichotomy_independence(Outcome& o) {
    int blow = 0;
    int global = 0;
    for (int a = -5; a <= 4; ++a) {
        const auto est = estimate_blowup_radius(NonlinearitySpec::power_plus_eps(3, 1), config(2, a));
        if (est.status == ProfileStatus::BlowUp) ++blow;
        if (shoot(NonlinearitySpec::constant(1), config(2, a)).status == ProfileStatus::Global) ++global;
    }
    o.require(blow == 10, "blow-ups " + std::to_string(blow));
    o.require(global == 10, "globals " + std::to_string(global));
    o.detail << "PowerPlusEps(3,1): " << blow << "/10 BlowUp; Constant(1): " << global << "/10 Global";
}

void comparison(Outcome& o) {
    const auto f = NonlinearitySpec::power_plus_eps(3, 1);
    const auto super_p = shoot(f, config(1, 1.0));
    o.require(super_p.status == ProfileStatus::BlowUp, "supersolution does not blow up");
    const double radius = super_p.r_lo;
    const EntireCandidate super{super_p, f, 2, PPlusK{1}};
    const auto grid = radial_grid(2, 1000, radius, 4242);
    const auto u_p = shoot(f, config(1, 0.0));
    const auto rep = comparison_experiment(sample_radial(u_p, grid, radius), super);
    o.require(rep.violations.empty(), std::to_string(rep.violations.size()) + " violations");
    o.require(rep.checked == 1000, std::to_string(rep.skipped) + " points skipped");

    auto shifted = sample_radial(super_p, grid, radius);
    for (double& v : shifted.values) v += 1.0;
    const auto neg = comparison_experiment(shifted, super);
    o.require(neg.violation_fraction() == 1.0, "negative control " + num(neg.violation_fraction()));
    o.detail << "R=" << num(radius) << ", " << rep.checked << " points, " << rep.violations.size()
             << " violations; control " << num(100.0 * neg.violation_fraction()) << "% violations";
}

void pucci_inf(Outcome& o) {
    DichotomyOptions opts;
    opts.points = 1000;
    opts.a = 0.0;
    const auto res = construct_pucci_inf(NonlinearitySpec::constant(1), 3, PucciParams(2, 3), opts);
    o.require(res.candidate.has_value(), "no candidate");
    if (!res.candidate) return;
    double worst = 0.0;
    for (const auto& s : res.candidate->profile.samples)
        worst = std::max(worst, std::abs(s.phi - (opts.a + s.r * s.r / 12.0)));
    o.require(worst <= 1e-10, "profile error " + num(worst));
    const double r = res.residual->max_abs;
    o.require(r <= 1e-10, "residual " + num(r));
    o.require(res.certificate.verdict == Verdict::Exists, "verdict");
    o.detail << "profile error " << num(worst) << ", mminus residual " << num(r);
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"blow-up radius oracle", blowup_radius_oracle},
        {"exact quadratic profiles", exact_profile},
        {"Keller-Osserman classification table", ko_table},
        {"radius sandwich bounds", sandwich},
        {"operator property suite", operator_suite},
        {"profile invariant sweep", invariant_sweep},
        {"PDE residual of existence certificates", pde_residual},
        {"dichotomy independent of initial value", dichotomy_independence},
        {"comparison experiment", comparison},
        {"Pucci inf-operator construction", pucci_inf},
    };
    int failed = 0;
    int id = 0;
    for (const auto& [name, fn] : criteria) {
        ++id;
        Outcome o;
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.str().c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
