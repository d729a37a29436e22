#include "ko/nonlinearity.hpp"

#include "ko/error.hpp"
#include "ko/quadrature.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ko {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, std::string(name) + " must be finite");
}

// Minimum of a continuous function over [lo, hi]: endpoints plus a Brent search.
double interval_min(const std::function<double(double)>& f, double lo, double hi) {
    double best = std::min(f(lo), f(hi));
    if (hi - lo <= 0.0) return best;
    const auto [x, fx] = boost::math::tools::brent_find_minima(f, lo, hi, 40);
    (void)x;
    return std::min(best, fx);
}

double tabulated_eval(const family::Tabulated& tab, double t) {
    const auto& k = tab.knots;
    if (t <= k.front().first) return k.front().second;
    if (k.size() == 1) return k.front().second;
    auto it = std::upper_bound(k.begin(), k.end(), t,
                               [](double v, const auto& knot) { return v < knot.first; });
    // Right of the last knot: continue the final segment.
    const auto hi = it == k.end() ? std::prev(k.end()) : it;
    const auto lo = std::prev(hi);
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

double truncated_eval(const family::TruncatedBelow& tr, double t) {
    const auto base = [&](double s) { return eval_f(tr.base, s); };
    if (t >= tr.t0) return base(t);
    const std::size_t cells = tr.running_min.size() - 1;
    if (t >= tr.t_min) {
        auto j = static_cast<std::size_t>(std::floor((tr.t0 - t) / tr.step));
        j = std::min(j, cells);
        const double node = tr.t0 - static_cast<double>(j) * tr.step;
        return std::min(tr.running_min[j], interval_min(base, t, std::max(t, node)));
    }
    // Below the precomputed grid: scan the remaining stretch cell by cell.
    double m = tr.running_min.back();
    double hi = tr.t_min;
    while (hi > t) {
        const double lo = std::max(t, hi - tr.step);
        m = std::min(m, interval_min(base, lo, hi));
        hi = lo;
    }
    return m;
}

double odd_eval(const family::OddExtension& od, double t) {
    if (t < 0.0) return -odd_eval(od, -t);
    return eval_f(od.base, t + od.t0) - eval_f(od.base, od.t0);
}

double affine_tail_value(const family::Affine& af) { return af.slope * af.t_cut + af.offset; }

double quad_primitive(const NonlinearitySpec& spec, double a, double t) {
    const auto r = quad::integrate([&](double s) { return eval_f(spec, s); }, a, t, 1e-12, 1e-300);
    return r.value;
}

// Integral of piecewise-linear data between consecutive breakpoints is exact
// under the trapezoid rule.
double tabulated_primitive(const NonlinearitySpec& spec, const family::Tabulated& tab, double a,
                           double t) {
    std::vector<double> pts{a};
    for (const auto& [x, y] : tab.knots)
        if (x > a && x < t) pts.push_back(x);
    pts.push_back(t);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        sum += 0.5 * (eval_f(spec, pts[i]) + eval_f(spec, pts[i + 1])) * (pts[i + 1] - pts[i]);
    }
    return sum;
}

double odd_half_primitive(const family::OddExtension& od, double x) {
    // Integral of f~ over [0, x] for x >= 0.
    return primitive(od.base, od.t0, od.t0 + x) - eval_f(od.base, od.t0) * x;
}

PropertyFlags sampled_flags(const NonlinearitySpec& spec, const ValidateOptions& opts) {
    const std::size_t n = std::max<std::size_t>(opts.grid_points, 3);
    std::vector<double> ts(n), fs(n);
    for (std::size_t i = 0; i < n; ++i) {
        ts[i] = -opts.half_width + 2.0 * opts.half_width * static_cast<double>(i) /
                                       static_cast<double>(n - 1);
        fs[i] = eval_f(spec, ts[i]);
    }
    PropertyFlags fl;
    fl.sampled = true;
    fl.positive = std::all_of(fs.begin(), fs.end(), [](double v) { return v > 0.0; });
    fl.nonnegative = std::all_of(fs.begin(), fs.end(), [](double v) { return v >= 0.0; });
    fl.nondecreasing = true;
    fl.strictly_increasing = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = fs[i + 1] - fs[i];
        const double tol = 1e-12 * std::max({1.0, std::abs(fs[i]), std::abs(fs[i + 1])});
        if (d < -tol) fl.nondecreasing = false;
        if (!(d > 0.0)) fl.strictly_increasing = false;
    }
    fl.strictly_increasing = fl.strictly_increasing && fl.nondecreasing;
    fl.convex = true;
    fl.convex_on_positives = true;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d2 = fs[i - 1] - 2.0 * fs[i] + fs[i + 1];
        const double tol = 1e-9 * std::max({1.0, std::abs(fs[i - 1]), std::abs(fs[i + 1])});
        if (d2 < -tol) {
            fl.convex = false;
            if (ts[i - 1] >= 0.0) fl.convex_on_positives = false;
        }
    }
    return fl;
}

KOVerdict analytic(KOStatus s, std::map<std::string, double> evidence) {
    KOVerdict v;
    v.status = s;
    v.method = KOMethod::Analytic;
    v.evidence = std::move(evidence);
    return v;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

NonlinearitySpec make_spec(NonlinearitySpec::Variant v) {
    return NonlinearitySpec(std::make_shared<const NonlinearitySpec::Variant>(std::move(v)));
}

NonlinearitySpec NonlinearitySpec::power_plus_eps(double gamma, double eps) {
    require_finite(gamma, "gamma");
    require_finite(eps, "eps");
    if (!(gamma > 0.0)) fail(ErrorKind::Parameter, "power_plus_eps: gamma must be > 0");
    if (eps < 0.0) fail(ErrorKind::Parameter, "power_plus_eps: eps must be >= 0");
    return make_spec(family::PowerPlusEps{gamma, eps});
}

NonlinearitySpec NonlinearitySpec::exponential(double scale) {
    require_finite(scale, "scale");
    if (!(scale > 0.0)) fail(ErrorKind::Parameter, "exponential: scale must be > 0");
    return make_spec(family::Exponential{scale});
}

NonlinearitySpec NonlinearitySpec::affine(double slope, double offset, std::optional<double> t_cut) {
    require_finite(slope, "slope");
    require_finite(offset, "offset");
    if (slope < 0.0) fail(ErrorKind::Parameter, "affine: slope must be >= 0");
    family::Affine af{slope, offset, 0.0, t_cut.has_value()};
    if (slope == 0.0) {
        af.t_cut = t_cut.value_or(0.0);
    } else if (t_cut) {
        require_finite(*t_cut, "t_cut");
        af.t_cut = *t_cut;
        if (!(affine_tail_value(af) > 0.0)) {
            fail(ErrorKind::Parameter, "affine: line must be positive at t_cut");
        }
    } else {
        af.t_cut = offset > 0.0 ? 0.0 : (1.0 - offset) / slope;
    }
    return make_spec(af);
}

NonlinearitySpec NonlinearitySpec::constant(double value) {
    require_finite(value, "value");
    return make_spec(family::Constant{value});
}

NonlinearitySpec NonlinearitySpec::tabulated(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) fail(ErrorKind::Parameter, "tabulated: at least one knot required");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        require_finite(knots[i].first, "knot t");
        require_finite(knots[i].second, "knot f");
        if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
            fail(ErrorKind::Parameter, "tabulated: knot abscissae must be strictly increasing");
        }
    }
    return make_spec(family::Tabulated{std::move(knots)});
}

NonlinearitySpec NonlinearitySpec::custom(std::function<double(double)> fn, std::string name) {
    if (!fn) fail(ErrorKind::Parameter, "custom: empty callable");
    return make_spec(family::Custom{std::move(fn), std::move(name)});
}

std::string NonlinearitySpec::family_name() const {
    return std::visit(Overloaded{
                          [](const family::PowerPlusEps&) { return "power_plus_eps"; },
                          [](const family::Exponential&) { return "exponential"; },
                          [](const family::Affine&) { return "affine"; },
                          [](const family::Constant&) { return "constant"; },
                          [](const family::Tabulated&) { return "tabulated"; },
                          [](const family::TruncatedBelow&) { return "truncated_below"; },
                          [](const family::OddExtension&) { return "odd_extension"; },
                          [](const family::Scaled&) { return "scaled"; },
                          [](const family::Custom&) { return "custom"; },
                      },
                      variant());
}

std::string NonlinearitySpec::describe() const {
    return std::visit(
        Overloaded{
            [](const family::PowerPlusEps& p) {
                return "power_plus_eps(gamma=" + fmt_num(p.gamma) + ",eps=" + fmt_num(p.eps) + ")";
            },
            [](const family::Exponential& e) { return "exponential(scale=" + fmt_num(e.scale) + ")"; },
            [](const family::Affine& a) {
                return "affine(slope=" + fmt_num(a.slope) + ",offset=" + fmt_num(a.offset) +
                       ",t_cut=" + fmt_num(a.t_cut) + ")";
            },
            [](const family::Constant& c) { return "constant(value=" + fmt_num(c.value) + ")"; },
            [](const family::Tabulated& t) {
                return "tabulated(knots=" + std::to_string(t.knots.size()) + ")";
            },
            [](const family::TruncatedBelow& t) {
                return "truncated_below(" + t.base.describe() + ",t0=" + fmt_num(t.t0) + ")";
            },
            [](const family::OddExtension& o) {
                return "odd_extension(" + o.base.describe() + ",t0=" + fmt_num(o.t0) + ")";
            },
            [](const family::Scaled& s) {
                return "scaled(" + s.base.describe() + ",factor=" + fmt_num(s.factor) + ")";
            },
            [](const family::Custom& c) { return "custom(" + c.name + ")"; },
        },
        variant());
}

double eval_f(const NonlinearitySpec& spec, double t) {
    const double v = std::visit(
        Overloaded{
            [t](const family::PowerPlusEps& p) {
                return t >= 0.0 ? std::pow(t, p.gamma) + p.eps : p.eps;
            },
            [t](const family::Exponential& e) { return e.scale * std::exp(t); },
            [t](const family::Affine& a) {
                if (a.slope == 0.0) return a.offset;
                if (t >= a.t_cut) return a.slope * t + a.offset;
                const double fc = affine_tail_value(a);
                return fc * std::exp(a.slope * (t - a.t_cut) / fc);
            },
            [](const family::Constant& c) { return c.value; },
            [t](const family::Tabulated& tab) { return tabulated_eval(tab, t); },
            [t](const family::TruncatedBelow& tr) { return truncated_eval(tr, t); },
            [t](const family::OddExtension& od) { return odd_eval(od, t); },
            [t](const family::Scaled& s) { return s.factor * eval_f(s.base, t); },
            [t](const family::Custom& c) { return c.fn(t); },
        },
        spec.variant());
    if (std::isnan(v)) fail(ErrorKind::Domain, spec.describe() + " is undefined at t=" + fmt_num(t));
    return v;
}

double primitive(const NonlinearitySpec& spec, double a, double t) {
    if (a > t) fail(ErrorKind::Parameter, "primitive: lower limit exceeds upper limit");
    if (a == t) return 0.0;
    return std::visit(
        Overloaded{
            [&](const family::PowerPlusEps& p) {
                const double g1 = p.gamma + 1.0;
                const double tp = std::max(t, 0.0);
                const double ap = std::max(a, 0.0);
                return p.eps * (t - a) + (std::pow(tp, g1) - std::pow(ap, g1)) / g1;
            },
            [&](const family::Exponential& e) { return e.scale * std::exp(a) * std::expm1(t - a); },
            [&](const family::Affine& af) {
                if (af.slope == 0.0) return af.offset * (t - a);
                double sum = 0.0;
                if (a < af.t_cut) {
                    const double fc = affine_tail_value(af);
                    const double u = std::min(t, af.t_cut);
                    const double k = af.slope / fc;
                    sum += fc / k * std::exp(k * (a - af.t_cut)) * std::expm1(k * (u - a));
                }
                if (t > af.t_cut) {
                    const double l = std::max(a, af.t_cut);
                    sum += (t - l) * (0.5 * af.slope * (t + l) + af.offset);
                }
                return sum;
            },
            [&](const family::Constant& c) { return c.value * (t - a); },
            [&](const family::Tabulated& tab) { return tabulated_primitive(spec, tab, a, t); },
            [&](const family::TruncatedBelow& tr) {
                double sum = 0.0;
                if (a < tr.t0) sum += quad_primitive(spec, a, std::min(t, tr.t0));
                if (t > tr.t0) sum += primitive(tr.base, std::max(a, tr.t0), t);
                return sum;
            },
            [&](const family::OddExtension& od) {
                return odd_half_primitive(od, std::abs(t)) - odd_half_primitive(od, std::abs(a));
            },
            [&](const family::Scaled& s) { return s.factor * primitive(s.base, a, t); },
            [&](const family::Custom&) { return quad_primitive(spec, a, t); },
        },
        spec.variant());
}

PropertyFlags validate(const NonlinearitySpec& spec, const ValidateOptions& opts) {
    return std::visit(
        Overloaded{
            [](const family::PowerPlusEps& p) {
                PropertyFlags fl;
                fl.positive = p.eps > 0.0;
                fl.nonnegative = true;
                fl.nondecreasing = true;
                fl.strictly_increasing = false;
                fl.convex_on_positives = p.gamma >= 1.0;
                fl.convex = p.gamma >= 1.0;
                return fl;
            },
            [](const family::Exponential&) {
                return PropertyFlags{true, true, true, true, true, true, false};
            },
            [](const family::Affine& a) {
                if (a.slope > 0.0) return PropertyFlags{true, true, true, true, true, true, false};
                return PropertyFlags{a.offset > 0.0, a.offset >= 0.0, true, false, true, true, false};
            },
            [](const family::Constant& c) {
                return PropertyFlags{c.value > 0.0, c.value >= 0.0, true, false, true, true, false};
            },
            [&](const family::Scaled& s) { return validate(s.base, opts); },
            [&](const auto&) { return sampled_flags(spec, opts); },
        },
        spec.variant());
}

const char* to_string(KOStatus s) noexcept {
    switch (s) {
        case KOStatus::Holds: return "Holds";
        case KOStatus::Fails: return "Fails";
        case KOStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(KOMethod m) noexcept {
    switch (m) {
        case KOMethod::Analytic: return "Analytic";
        case KOMethod::NumericalExtrapolation: return "NumericalExtrapolation";
    }
    return "?";
}

std::optional<KOVerdict> classify_ko_analytic(const NonlinearitySpec& spec) {
    return std::visit(
        Overloaded{
            [](const family::PowerPlusEps& p) -> std::optional<KOVerdict> {
                // (integral of f)^(-1/2) ~ t^(-(gamma+1)/2) at infinity.
                const double decay = 0.5 * (p.gamma + 1.0);
                return analytic(p.gamma <= 1.0 ? KOStatus::Holds : KOStatus::Fails,
                                {{"tail_decay_exponent", decay}});
            },
            [](const family::Exponential&) -> std::optional<KOVerdict> {
                return analytic(KOStatus::Fails, {{"tail_exponential_rate", 0.5}});
            },
            [](const family::Affine& a) -> std::optional<KOVerdict> {
                return analytic(KOStatus::Holds,
                                {{"tail_decay_exponent", a.slope > 0.0 ? 1.0 : 0.5}});
            },
            [](const family::Constant& c) -> std::optional<KOVerdict> {
                return analytic(KOStatus::Holds,
                                {{"tail_decay_exponent", c.value > 0.0 ? 0.5 : 0.0}});
            },
            [](const family::Scaled& s) -> std::optional<KOVerdict> {
                return classify_ko_analytic(s.base);
            },
            [](const auto&) -> std::optional<KOVerdict> { return std::nullopt; },
        },
        spec.variant());
}

KOVerdict classify_ko_numerical(const NonlinearitySpec& spec) {
    KOVerdict v;
    v.method = KOMethod::NumericalExtrapolation;
    v.status = KOStatus::Inconclusive;

    const double f0 = eval_f(spec, 0.0);
    v.evidence["head_bound"] =
        f0 > 0.0 ? 2.0 / std::sqrt(f0) : std::numeric_limits<double>::infinity();

    double start = 1.0;
    while (start <= 1e6 && !(primitive(spec, 0.0, start) > 0.0)) start *= 2.0;
    if (start > 1e6) {
        v.evidence["vanishing_primitive"] = 1.0;
        return v;
    }
    v.evidence["ladder_start"] = start;

    const auto integrand = [&](double t) { return 1.0 / std::sqrt(primitive(spec, 0.0, t)); };
    double acc = 0.0;
    double lo = start;
    std::vector<double> increments;
    for (int j = 1; j <= 6; ++j) {
        const double hi = std::pow(10.0, j);
        double inc = 0.0;
        if (hi > lo) {
            inc = quad::integrate(integrand, lo, hi, 1e-10, 1e-300).value;
            lo = hi;
        }
        acc += inc;
        v.ladder.emplace_back(hi, acc);
        if (j >= 2) increments.push_back(inc);
    }

    const double last = increments.back();
    v.evidence["last_increment"] = last;
    if (!std::isfinite(acc)) return v;
    if (last < 1e-8) {
        v.status = KOStatus::Fails;
        v.evidence["cauchy"] = 1.0;
        return v;
    }
    // Least-squares slope of log10(increment) against decade index over the
    // last three decades: the growth exponent of the tail per decade.
    const std::size_t m = 3;
    const std::size_t off = increments.size() - m;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!(increments[off + i] > 0.0)) return v;
        const double x = static_cast<double>(i);
        const double y = std::log10(increments[off + i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    v.evidence["growth_exponent"] = slope;
    if (slope <= -0.1) {
        const double rho = std::pow(10.0, slope);
        v.evidence["extrapolated_remainder"] = last * rho / (1.0 - rho);
        v.status = KOStatus::Fails;
    } else if (slope >= -0.02 && last >= 1e-6) {
        v.status = KOStatus::Holds;
    }
    return v;
}

KOVerdict classify_ko(const NonlinearitySpec& spec) {
    const PropertyFlags fl = validate(spec);
    if (!fl.nonnegative) {
        fail(ErrorKind::Hypothesis, "classify_ko: " + spec.describe() + " is not nonnegative");
    }
    if (!fl.nondecreasing) {
        fail(ErrorKind::Hypothesis, "classify_ko: " + spec.describe() + " is not nondecreasing");
    }
    if (auto a = classify_ko_analytic(spec)) return *a;
    return classify_ko_numerical(spec);
}

NonlinearitySpec truncate_below(const NonlinearitySpec& spec, double t0,
                                const TruncationOptions& opts) {
    require_finite(t0, "t0");
    if (!(opts.span > 0.0) || opts.cells == 0) {
        fail(ErrorKind::Parameter, "truncate_below: grid span and cell count must be positive");
    }
    if (!validate(spec).positive) {
        fail(ErrorKind::Hypothesis, "truncate_below: base " + spec.describe() + " is not positive");
    }
    family::TruncatedBelow tr{spec, t0, t0 - opts.span, opts.span / static_cast<double>(opts.cells),
                              {}};
    tr.running_min.resize(opts.cells + 1);
    const auto base = [&](double s) { return eval_f(spec, s); };
    tr.running_min[0] = base(t0);
    for (std::size_t j = 1; j <= opts.cells; ++j) {
        const double hi = t0 - static_cast<double>(j - 1) * tr.step;
        const double lo = t0 - static_cast<double>(j) * tr.step;
        tr.running_min[j] = std::min(tr.running_min[j - 1], interval_min(base, lo, hi));
    }
    return make_spec(std::move(tr));
}

NonlinearitySpec odd_extension(const NonlinearitySpec& spec, double t0) {
    require_finite(t0, "t0");
    const PropertyFlags fl = validate(spec);
    if (!fl.strictly_increasing) {
        fail(ErrorKind::Hypothesis,
             "odd_extension: base " + spec.describe() + " is not strictly_increasing");
    }
    if (!fl.convex) {
        fail(ErrorKind::Hypothesis, "odd_extension: base " + spec.describe() + " is not convex");
    }
    return make_spec(family::OddExtension{spec, t0});
}

NonlinearitySpec scaled(const NonlinearitySpec& spec, double factor) {
    require_finite(factor, "factor");
    if (!(factor > 0.0)) fail(ErrorKind::Parameter, "scaled: factor must be > 0");
    return make_spec(family::Scaled{spec, factor});
}

BetaReport check_beta(const NonlinearitySpec& spec, std::span<const BetaSample> samples) {
    if (!std::holds_alternative<family::OddExtension>(spec.variant())) {
        fail(ErrorKind::Parameter, "check_beta: spec must be an odd extension");
    }
    BetaReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (s.h < 0.0) fail(ErrorKind::Parameter, "check_beta: h must be >= 0");
        const double upper = eval_f(spec, s.t + s.h);
        const double margin = upper - eval_f(spec, s.t) - 2.0 * eval_f(spec, 0.5 * s.h);
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -1e-9 * std::max(1.0, std::abs(upper))) rep.failures.push_back(s);
    }
    if (samples.empty()) rep.worst_margin = 0.0;
    return rep;
}

}  // namespace ko
