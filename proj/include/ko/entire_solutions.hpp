#pragma once

#include "ko/matrixops.hpp"
#include "ko/nonlinearity.hpp"
#include "ko/radial_ode.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ko {

using Point = std::vector<double>;

/// Phi(x) = phi(|x|) in R^n tested against Op(D^2 Phi) = f(Phi) (or >= for
/// the subsolution route).
struct EntireCandidate {
    RadialProfile profile;
    NonlinearitySpec spec;
    std::size_t n = 1;
    Operator op = MPlus01{};
};

/// D^2 Phi(x) = (phi'/r) I + (phi'' - phi'/r) (x/r)(x/r)^T, and phi''(0) I at x = 0.
SymMatrix hessian_radial(const RadialProfile& profile, std::span<const double> x);

struct ResidualPoint {
    double r;
    double op_value;
    double f_value;
    double residual;  // op_value - f_value
};

struct ResidualReport {
    double max_abs = 0.0;
    double min_signed = 0.0;
    double max_signed = 0.0;
    std::vector<ResidualPoint> points;
};

/// Op(hessian_radial(x)) - f(Phi(x)) at every point. OpenMP-parallel.
ResidualReport residual(const EntireCandidate& cand, std::span<const Point> points);
/// Serial reference for residual(); results are bitwise identical.
ResidualReport residual_serial(const EntireCandidate& cand, std::span<const Point> points);

/// phi'' >= phi'/r - tol at every sample with r > 0. Under this ordering
/// P+_k(D^2 Phi) = phi'' + (k-1) phi'/r.
bool verify_convexity_ordering(const RadialProfile& profile, double tol = 1e-9);

/// Candidate subsolution u sampled at points of the ball B_radius.
struct GridSamples {
    std::vector<Point> points;
    std::vector<double> values;
    double radius = 0.0;

    /// Throws an input error unless sizes agree and every |point| < radius.
    void validate() const;
};

/// Points at radii radius * (j + 1/2) / count, j = 0..count-1, each in a
/// seeded random direction.
std::vector<Point> radial_grid(std::size_t n, std::size_t count, double radius,
                               std::uint64_t seed);
/// Uniform random points in the closed ball of the given radius.
std::vector<Point> random_ball_points(std::size_t n, std::size_t count, double radius,
                                      std::uint64_t seed);

/// u = phi_u(|x|) at each point.
GridSamples sample_radial(const RadialProfile& profile, std::vector<Point> points, double radius);

struct ComparisonReport {
    std::size_t checked = 0;
    std::size_t skipped = 0;  // points beyond the sampled range of the supersolution
    std::vector<std::size_t> violations;
    double worst_excess = 0.0;  // max of u - Phi
    double violation_fraction() const noexcept {
        return checked == 0 ? 0.0 : static_cast<double>(violations.size()) / static_cast<double>(checked);
    }
};

/// Empirical check of u(x) <= Phi(x) + 1e-9 max(1, |Phi|) on the samples.
ComparisonReport comparison_experiment(const GridSamples& u, const EntireCandidate& super);

enum class Verdict { Exists, NotExists, Inconclusive };
const char* to_string(Verdict v) noexcept;

struct DichotomyCertificate {
    Verdict verdict = Verdict::Inconclusive;
    KOVerdict ko;
    /// Upper bound on the blow-up radius of the comparison profile (NotExists).
    std::optional<double> radius_bound;
    /// Worst residual of the entire candidate (Exists). Equation routes report
    /// max |Op - f|; the subsolution route reports max(0, f - Op).
    std::optional<double> residual_max;
    std::optional<std::string> profile_csv;
    /// c used for the profile or the bound.
    double c = 1.0;
    std::string note;
    std::optional<RadialProfile> profile;
};

struct DichotomyOptions {
    double a = 0.0;
    double r_max = 10.0;
    std::size_t points = 1000;
    std::uint64_t seed = 20240901;
    double tolerance = 1e-6;
};

/// Existence/non-existence evidence for P+_k(D^2 u) >= f(u) or
/// M+_{0,1}(D^2 u) >= f(u) in R^n.
DichotomyCertificate dichotomy(const NonlinearitySpec& spec, const Operator& op, std::size_t n,
                               const DichotomyOptions& opts = {});

struct PucciInfResult {
    DichotomyCertificate certificate;
    std::optional<EntireCandidate> candidate;
    std::optional<ResidualReport> residual;
    /// n <= 1 + Lambda / lambda, under which the KO condition is also necessary.
    bool dimension_condition = false;
};

/// Radial candidate for M-_{lambda,Lambda}(D^2 u) >= f(u): shoots with c = n and
/// nonlinearity f / lambda.
PucciInfResult construct_pucci_inf(const NonlinearitySpec& spec, std::size_t n,
                                   const PucciParams& params, const DichotomyOptions& opts = {});

}  // namespace ko
