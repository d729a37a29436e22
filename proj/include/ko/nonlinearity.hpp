#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ko {

namespace family {
struct PowerPlusEps;
struct Exponential;
struct Affine;
struct Constant;
struct Tabulated;
struct TruncatedBelow;
struct OddExtension;
struct Scaled;
struct Custom;
}  // namespace family

/// Zero-order term f: R -> R. Immutable value handle; copies share the
/// underlying representation (including any precomputed grids).
class NonlinearitySpec {
public:
    using Variant = std::variant<family::PowerPlusEps, family::Exponential, family::Affine,
                                 family::Constant, family::Tabulated, family::TruncatedBelow,
                                 family::OddExtension, family::Scaled, family::Custom>;

    /// f(t) = t^gamma + eps for t >= 0, eps for t < 0.
    static NonlinearitySpec power_plus_eps(double gamma, double eps);
    /// f(t) = scale * e^t.
    static NonlinearitySpec exponential(double scale = 1.0);
    /// f(t) = slope * t + offset for t >= t_cut. Below t_cut the line is
    /// continued by the C^1 exponential tail f(t_cut) exp(slope (t - t_cut) / f(t_cut)),
    /// so f stays positive, strictly increasing and convex when slope > 0.
    /// Default t_cut: 0 when offset > 0, otherwise the point where the line equals 1.
    static NonlinearitySpec affine(double slope, double offset,
                                   std::optional<double> t_cut = std::nullopt);
    static NonlinearitySpec constant(double value);
    /// Piecewise linear through knots (strictly increasing t); constant to the
    /// left of the first knot, linear continuation of the last segment to the right.
    static NonlinearitySpec tabulated(std::vector<std::pair<double, double>> knots);
    /// Arbitrary callable. Not serializable; integrated by quadrature, so a kink
    /// that falls between quadrature nodes limits primitive() to about 1e-8.
    static NonlinearitySpec custom(std::function<double(double)> fn, std::string name);

    const Variant& variant() const noexcept;
    /// Family tag as used in the JSON schema.
    std::string family_name() const;
    /// Human-readable identifier including parameters.
    std::string describe() const;

private:
    explicit NonlinearitySpec(std::shared_ptr<const Variant> node) : node_(std::move(node)) {}
    friend NonlinearitySpec make_spec(Variant v);

    std::shared_ptr<const Variant> node_;
};

namespace family {
struct PowerPlusEps {
    double gamma;
    double eps;
};
struct Exponential {
    double scale;
};
struct Affine {
    double slope;
    double offset;
    double t_cut;
    bool t_cut_explicit;
};
struct Constant {
    double value;
};
struct Tabulated {
    std::vector<std::pair<double, double>> knots;
};
struct TruncatedBelow {
    NonlinearitySpec base;
    double t0;
    double t_min;
    double step;
    /// running_min[j] = min of base over [t0 - j*step, t0].
    std::vector<double> running_min;
};
struct OddExtension {
    NonlinearitySpec base;
    double t0;
};
struct Scaled {
    NonlinearitySpec base;
    double factor;
};
struct Custom {
    std::function<double(double)> fn;
    std::string name;
};
}  // namespace family

inline const NonlinearitySpec::Variant& NonlinearitySpec::variant() const noexcept { return *node_; }

double eval_f(const NonlinearitySpec& spec, double t);

/// F(t; a) = integral of f over [a, t].
double primitive(const NonlinearitySpec& spec, double a, double t);

struct PropertyFlags {
    bool positive = false;
    bool nonnegative = false;
    bool nondecreasing = false;
    bool strictly_increasing = false;
    bool convex_on_positives = false;
    bool convex = false;
    /// True when the flags come from dense sampling rather than the formula.
    bool sampled = false;
};

struct ValidateOptions {
    std::size_t grid_points = 10000;
    double half_width = 100.0;
};

PropertyFlags validate(const NonlinearitySpec& spec, const ValidateOptions& opts = {});

enum class KOStatus { Holds, Fails, Inconclusive };
enum class KOMethod { Analytic, NumericalExtrapolation };

const char* to_string(KOStatus s) noexcept;
const char* to_string(KOMethod m) noexcept;

struct KOVerdict {
    KOStatus status = KOStatus::Inconclusive;
    KOMethod method = KOMethod::Analytic;
    /// Scalar diagnostics (tail rate, fitted exponent, head bound, ...).
    std::map<std::string, double> evidence;
    /// (T, I(T)) with I(T) = integral over [1, T] of F(t;0)^(-1/2).
    std::vector<std::pair<double, double>> ladder;
};

/// Keller-Osserman classification. Uses the closed form where the family
/// admits one and the numerical ladder otherwise. Requires f nonnegative
/// and nondecreasing.
KOVerdict classify_ko(const NonlinearitySpec& spec);
/// Ladder extrapolation regardless of family.
KOVerdict classify_ko_numerical(const NonlinearitySpec& spec);
/// Closed-form verdict, or nullopt for families without one.
std::optional<KOVerdict> classify_ko_analytic(const NonlinearitySpec& spec);

struct TruncationOptions {
    double span = 100.0;
    std::size_t cells = 10000;
};

/// f~(t) = f(t) for t >= t0, min of f over [t, t0] for t < t0.
NonlinearitySpec truncate_below(const NonlinearitySpec& spec, double t0,
                                const TruncationOptions& opts = {});

/// f~(t) = f(t + t0) - f(t0) for t >= 0, -f~(-t) for t < 0. Requires f
/// strictly increasing and convex.
NonlinearitySpec odd_extension(const NonlinearitySpec& spec, double t0);

/// factor * f, factor > 0.
NonlinearitySpec scaled(const NonlinearitySpec& spec, double factor);

struct BetaSample {
    double t;
    double h;
};

struct BetaReport {
    double worst_margin = 0.0;
    std::vector<BetaSample> failures;
    bool ok() const noexcept { return failures.empty(); }
};

/// Checks f~(t + h) - f~(t) >= 2 f~(h / 2) - 1e-9 for an odd extension.
BetaReport check_beta(const NonlinearitySpec& spec, std::span<const BetaSample> samples);

}  // namespace ko
