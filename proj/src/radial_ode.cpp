#include "ko/radial_ode.hpp"

#include "ko/error.hpp"
#include "ko/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace ko {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_ode_hypotheses(const NonlinearitySpec& spec) {
    const PropertyFlags fl = validate(spec);
    if (!fl.nonnegative) {
        fail(ErrorKind::Hypothesis, spec.describe() + " is not nonnegative");
    }
    if (!fl.nondecreasing) {
        fail(ErrorKind::Hypothesis, spec.describe() + " is not nondecreasing");
    }
}

struct State {
    double phi;
    double psi;
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class RadialSystem {
public:
    RadialSystem(const NonlinearitySpec& spec, double c) : spec_(spec), c_(c) {}

    State rhs(double r, State y) const {
        return {y.psi, eval_f(spec_, y.phi) - (c_ - 1.0) * y.psi / r};
    }

    struct StepResult {
        State y;
        double err;  // scaled error norm; +inf when a stage is non-finite
    };

    StepResult step(double r, State y, double h, double rtol, double atol) const {
        try {
            const State k1 = rhs(r, y);
            const State k2 = rhs(r + c2 * h, {y.phi + h * a21 * k1.phi, y.psi + h * a21 * k1.psi});
            const State k3 = rhs(r + c3 * h, {y.phi + h * (a31 * k1.phi + a32 * k2.phi),
                                              y.psi + h * (a31 * k1.psi + a32 * k2.psi)});
            const State k4 =
                rhs(r + c4 * h, {y.phi + h * (a41 * k1.phi + a42 * k2.phi + a43 * k3.phi),
                                 y.psi + h * (a41 * k1.psi + a42 * k2.psi + a43 * k3.psi)});
            const State k5 = rhs(
                r + c5 * h,
                {y.phi + h * (a51 * k1.phi + a52 * k2.phi + a53 * k3.phi + a54 * k4.phi),
                 y.psi + h * (a51 * k1.psi + a52 * k2.psi + a53 * k3.psi + a54 * k4.psi)});
            const State k6 = rhs(
                r + h, {y.phi + h * (a61 * k1.phi + a62 * k2.phi + a63 * k3.phi + a64 * k4.phi +
                                     a65 * k5.phi),
                        y.psi + h * (a61 * k1.psi + a62 * k2.psi + a63 * k3.psi + a64 * k4.psi +
                                     a65 * k5.psi)});
            const State yn{
                y.phi + h * (b1 * k1.phi + b3 * k3.phi + b4 * k4.phi + b5 * k5.phi + b6 * k6.phi),
                y.psi + h * (b1 * k1.psi + b3 * k3.psi + b4 * k4.psi + b5 * k5.psi + b6 * k6.psi)};
            const State k7 = rhs(r + h, yn);
            const double ephi = h * (e1 * k1.phi + e3 * k3.phi + e4 * k4.phi + e5 * k5.phi +
                                     e6 * k6.phi + e7 * k7.phi);
            const double epsi = h * (e1 * k1.psi + e3 * k3.psi + e4 * k4.psi + e5 * k5.psi +
                                     e6 * k6.psi + e7 * k7.psi);
            if (!std::isfinite(yn.phi) || !std::isfinite(yn.psi) || !std::isfinite(ephi) ||
                !std::isfinite(epsi)) {
                return {yn, kInf};
            }
            const double sphi = atol + rtol * std::max(std::abs(y.phi), std::abs(yn.phi));
            const double spsi = atol + rtol * std::max(std::abs(y.psi), std::abs(yn.psi));
            return {yn, std::max(std::abs(ephi) / sphi, std::abs(epsi) / spsi)};
        } catch (const Error&) {
            return {y, kInf};
        }
    }

    double second_derivative(double r, State y) const {
        return eval_f(spec_, y.phi) - (c_ - 1.0) * y.psi / r;
    }

private:
    const NonlinearitySpec& spec_;
    double c_;
};

// Remaining distance to blow-up from (phi*, psi*), integrating
// dr = dphi / sqrt(psi*^2 + 2 k F(phi; phi*)). k = 1 gives a lower bound and
// k = 1/c an upper bound, from f/c <= phi'' <= f.
quad::TailResult tail_distance(const NonlinearitySpec& spec, double phi, double psi, double k) {
    const double f = eval_f(spec, phi);
    double width = f > 0.0 ? psi * psi / (2.0 * f) : std::max(1.0, std::abs(phi));
    if (!std::isfinite(width) || width <= 0.0) width = std::max(1.0, std::abs(phi));
    width = std::max(width, 1e-12 * std::max(1.0, std::abs(phi)));
    const double psi2 = psi * psi;
    const auto g = [&](double x) {
        const double F = primitive(spec, phi, x);
        return 1.0 / std::sqrt(psi2 + 2.0 * k * F);
    };
    return quad::integrate_to_infinity(g, phi, width, 1e-10);
}

struct Bracket {
    bool ok = false;
    double lo = 0.0;
    double hi = 0.0;
};

Bracket blowup_bracket(const NonlinearitySpec& spec, double c, double r, State y) {
    if (!(y.psi > 0.0)) return {};
    const auto lo = tail_distance(spec, y.phi, y.psi, 1.0);
    if (lo.status != quad::TailStatus::Converged) return {};
    double hi_len = lo.value;
    if (c > 1.0) {
        const auto hi = tail_distance(spec, y.phi, y.psi, 1.0 / c);
        if (hi.status != quad::TailStatus::Converged) return {};
        hi_len = hi.value;
    }
    return {true, r + lo.value, r + std::max(hi_len, lo.value)};
}

// Monotonicity-preserving cubic Hermite on [x0, x1] (Fritsch-Carlson limiter).
struct Hermite {
    double value;
    double slope;
};

Hermite hermite(double x0, double x1, double y0, double y1, double m0, double m1, double x) {
    const double h = x1 - x0;
    const double delta = (y1 - y0) / h;
    if (delta == 0.0) {
        m0 = 0.0;
        m1 = 0.0;
    } else {
        const double al = m0 / delta;
        const double be = m1 / delta;
        if (al < 0.0) m0 = 0.0;
        if (be < 0.0) m1 = 0.0;
        const double s = al * al + be * be;
        if (al >= 0.0 && be >= 0.0 && s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m0 = tau * al * delta;
            m1 = tau * be * delta;
        }
    }
    const double t = (x - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    const double value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
    const double d00 = (6 * t2 - 6 * t) / h;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h;
    const double d11 = 3 * t2 - 2 * t;
    const double slope = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
    return {value, slope};
}

}  // namespace

const char* to_string(ProfileStatus s) noexcept {
    return s == ProfileStatus::Global ? "global" : "blowup";
}

void ShootConfig::validate() const {
    auto bad = [](const std::string& what) { fail(ErrorKind::Parameter, "shoot config: " + what); };
    if (!std::isfinite(c) || c < 1.0) bad("c must be >= 1 (got " + num(c) + ")");
    if (!std::isfinite(a)) bad("a must be finite");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) bad("r_max must be > 0");
    if (!(rel_tol > 0.0)) bad("rel_tol must be > 0");
    if (!(abs_tol > 0.0)) bad("abs_tol must be > 0");
    if (!(blowup_cap > 0.0)) bad("blowup_cap must be > 0");
    if (!(min_step > 0.0)) bad("min_step must be > 0");
}

RadialProfile shoot(const NonlinearitySpec& spec, const ShootConfig& cfg) {
    cfg.validate();
    require_ode_hypotheses(spec);

    RadialProfile prof;
    prof.c = cfg.c;
    prof.a = cfg.a;
    prof.spec_id = spec.describe();
    prof.spec = spec;

    const double c = cfg.c;
    const double fa = eval_f(spec, cfg.a);
    prof.samples.push_back({0.0, cfg.a, 0.0, fa / c});

    // Series start: phi = a + alpha r^2 + beta r^4 with beta = f'(a) f(a) / (8 c (c + 2)).
    const double alpha = fa / (2.0 * c);
    const double delta = 1e-6 * std::max(1.0, std::abs(cfg.a));
    const double dfa = (eval_f(spec, cfg.a + delta) - fa) / delta;
    const double beta = std::isfinite(dfa) ? dfa * fa / (8.0 * c * (c + 2.0)) : 0.0;
    const double series_tol = cfg.abs_tol + cfg.rel_tol * std::max(1.0, std::abs(cfg.a));
    double h0 = std::min(1e-4, cfg.r_max);
    if (beta != 0.0) h0 = std::min(h0, std::pow(series_tol / std::abs(beta), 0.25));

    RadialSystem sys(spec, c);
    double r = h0;
    State y{cfg.a + alpha * h0 * h0 + beta * std::pow(h0, 4), 2.0 * alpha * h0 + 4.0 * beta * std::pow(h0, 3)};
    prof.samples.push_back({r, y.phi, y.psi, sys.second_derivative(r, y)});

    double h = std::min(h0, cfg.r_max - r);
    double next_cap_check = cfg.blowup_cap;
    constexpr std::size_t kMaxSteps = 5'000'000;

    auto finish_blowup = [&](const Bracket& b) {
        prof.status = ProfileStatus::BlowUp;
        prof.r_lo = b.lo;
        prof.r_hi = b.hi;
        return prof;
    };

    for (std::size_t steps = 0; r < cfg.r_max; ++steps) {
        if (steps > kMaxSteps) {
            fail(ErrorKind::Integration, "shoot: step budget exhausted at r=" + num(r));
        }
        h = std::min(h, cfg.r_max - r);
        const auto res = sys.step(r, y, h, cfg.rel_tol, cfg.abs_tol);
        if (res.err <= 1.0) {
            const double r_new = (cfg.r_max - r - h <= 1e-15 * cfg.r_max) ? cfg.r_max : r + h;
            if (!(r_new > r)) {
                // The step no longer advances r: the solution has outrun double resolution.
                const Bracket b = blowup_bracket(spec, c, r, y);
                if (b.ok) return finish_blowup(b);
                fail(ErrorKind::Integration, "shoot: step underflow at r=" + num(r));
            }
            r = r_new;
            y = res.y;
            prof.samples.push_back({r, y.phi, y.psi, sys.second_derivative(r, y)});
            if (r >= cfg.r_max) break;
            const double grow = res.err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(res.err, -0.2)));
            h *= grow;

            if (y.phi > next_cap_check) {
                const Bracket b = blowup_bracket(spec, c, r, y);
                if (b.ok && b.hi - b.lo <= 1e-8 * b.hi) return finish_blowup(b);
                next_cap_check = 10.0 * y.phi;
            }
        } else {
            const double shrink =
                std::isfinite(res.err) ? std::max(0.1, 0.9 * std::pow(res.err, -0.2)) : 0.1;
            h *= shrink;
        }
        if (h < cfg.min_step * std::max(1.0, r)) {
            const Bracket b = blowup_bracket(spec, c, r, y);
            if (b.ok && y.phi > cfg.a) return finish_blowup(b);
            fail(ErrorKind::Integration,
                 "shoot: step size collapsed at r=" + num(r) + " with phi=" + num(y.phi) +
                     " but no finite blow-up tail was found");
        }
    }

    prof.status = ProfileStatus::Global;
    prof.r_lo = r;
    prof.r_hi = kInf;
    return prof;
}

ProfileSample evaluate_profile(const RadialProfile& profile, double r) {
    const auto& s = profile.samples;
    if (s.empty()) fail(ErrorKind::Domain, "empty profile");
    if (r < 0.0 || r > s.back().r) {
        fail(ErrorKind::Domain, "radius " + num(r) + " outside sampled range [0, " +
                                    num(s.back().r) + "]");
    }
    if (r == 0.0) return s.front();
    auto it = std::lower_bound(s.begin(), s.end(), r,
                               [](const ProfileSample& p, double v) { return p.r < v; });
    if (it->r == r) return *it;
    const ProfileSample& p1 = *it;
    const ProfileSample& p0 = *std::prev(it);
    const Hermite phi = hermite(p0.r, p1.r, p0.phi, p1.phi, p0.dphi, p1.dphi, r);
    const Hermite dphi = hermite(p0.r, p1.r, p0.dphi, p1.dphi, p0.ddphi, p1.ddphi, r);
    ProfileSample out{r, phi.value, dphi.value, dphi.slope};
    if (profile.spec) {
        out.ddphi = eval_f(*profile.spec, out.phi) - (profile.c - 1.0) * out.dphi / r;
    }
    return out;
}

namespace {

quad::TailResult sandwich_lower_integral(const NonlinearitySpec& spec, double a) {
    const double fa = eval_f(spec, a);
    // phi = a + s^2 removes the (phi - a)^(-1/2) endpoint singularity.
    const double at_zero = std::sqrt(2.0 / fa);
    const auto g = [&](double s) {
        if (s == 0.0) return at_zero;
        const double F = primitive(spec, a, a + s * s);
        return 2.0 * s / std::sqrt(2.0 * F);
    };
    return quad::integrate_to_infinity(g, 0.0, 1.0, 1e-12);
}

}  // namespace

RadiusBounds radius_bounds(const NonlinearitySpec& spec, double a, double c) {
    if (!std::isfinite(c) || c < 1.0) fail(ErrorKind::Parameter, "radius_bounds: c must be >= 1");
    if (!std::isfinite(a)) fail(ErrorKind::Parameter, "radius_bounds: a must be finite");
    RadiusBounds rb;
    rb.lower = kInf;
    rb.upper = kInf;
    const KOVerdict ko = classify_ko(spec);
    if (ko.status == KOStatus::Holds) {
        rb.method = "unbounded: Keller-Osserman condition holds";
        return rb;
    }
    if (!(eval_f(spec, a) > 0.0)) {
        fail(ErrorKind::Hypothesis,
             "radius_bounds: f(a) must be positive (" + spec.describe() + ", a=" + num(a) + ")");
    }
    const auto tail = sandwich_lower_integral(spec, a);
    rb.panels = tail.panels;
    if (tail.status != quad::TailStatus::Converged) {
        rb.method = "unbounded: sandwich integral does not converge";
        return rb;
    }
    rb.bounded = true;
    rb.lower = tail.value;
    rb.upper = std::sqrt(c) * tail.value;
    rb.method = "gauss-kronrod panels, phi = a + s^2";
    return rb;
}

double energy_radius_c1(const NonlinearitySpec& spec, double a) {
    const RadiusBounds rb = radius_bounds(spec, a, 1.0);
    return rb.bounded ? rb.lower : kInf;
}

BlowupEstimate estimate_blowup_radius(const NonlinearitySpec& spec, const ShootConfig& cfg) {
    cfg.validate();
    require_ode_hypotheses(spec);
    BlowupEstimate est;
    if (eval_f(spec, cfg.a) > 0.0) {
        est.bounds = radius_bounds(spec, cfg.a, cfg.c);
    } else {
        est.bounds.lower = est.bounds.upper = kInf;
        est.bounds.method = "not computed: f(a) = 0";
    }
    ShootConfig run = cfg;
    if (est.bounds.bounded) run.r_max = est.bounds.upper * (1.0 + 1e-3) + 1e-3;
    const RadialProfile prof = shoot(spec, run);
    est.status = prof.status;
    est.r_lo = prof.r_lo;
    est.r_hi = prof.r_hi;
    if (prof.status == ProfileStatus::BlowUp) {
        est.radius = 0.5 * (prof.r_lo + prof.r_hi);
    } else {
        if (est.bounds.bounded) {
            fail(ErrorKind::Integration, "estimate_blowup_radius: solution passed the radius bound " +
                                             num(est.bounds.upper) + " without blowing up");
        }
        est.radius = prof.r_end();
    }
    return est;
}

InvariantReport check_profile_invariants(const RadialProfile& profile,
                                         const NonlinearitySpec& spec, double tol) {
    InvariantReport rep;
    const double c = profile.c;
    double prev_flux = -kInf;
    double prev_phi = -kInf;
    for (const auto& s : profile.samples) {
        const double f = eval_f(spec, s.phi);
        const double scale = std::max({1.0, std::abs(f), std::abs(s.dphi)});
        rep.monotone = std::max(rep.monotone, -s.dphi / scale);
        rep.convex = std::max(rep.convex, -s.ddphi / scale);
        rep.upper_second = std::max(rep.upper_second, (s.ddphi - f) / scale);
        rep.lower_second = std::max(rep.lower_second, (f / c - s.ddphi) / scale);
        if (s.r > 0.0) {
            const double ratio = s.dphi / s.r;
            rep.eigen_comparison = std::max(rep.eigen_comparison, (ratio - f / c) / scale);
            rep.last = std::max(rep.last, (ratio - s.ddphi) / scale);
        }
        const double flux = std::pow(s.r, c - 1.0) * s.dphi;
        if (prev_flux > -kInf) {
            rep.flux = std::max(rep.flux, (prev_flux - flux) / std::max(1.0, std::abs(flux)));
        }
        if (s.phi < prev_phi) rep.monotone = std::max(rep.monotone, (prev_phi - s.phi) / scale);
        prev_flux = flux;
        prev_phi = s.phi;
        ++rep.checked;
    }
    rep.ok = rep.monotone <= tol && rep.convex <= tol && rep.eigen_comparison <= tol &&
             rep.lower_second <= tol && rep.upper_second <= tol && rep.last <= tol &&
             rep.flux <= tol;
    return rep;
}

}  // namespace ko
