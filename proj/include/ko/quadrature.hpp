#pragma once

#include <cstddef>
#include <functional>

namespace ko::quad {

using Integrand = std::function<double(double)>;

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]. Bisects the interval
/// with the largest error until error <= max(abs_tol, rel_tol * |value|).
Result integrate(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                 double abs_tol = 0.0, std::size_t max_intervals = 4000);

enum class TailStatus { Converged, Diverged, Unresolved };

struct TailResult {
    double value = 0.0;
    /// Extrapolated remainder already included in `value`.
    double remainder = 0.0;
    double last_ratio = 0.0;
    std::size_t panels = 0;
    TailStatus status = TailStatus::Unresolved;
};

/// Integral of a non-negative f over [a, +inf) as a sum of geometrically
/// growing panels [a + w(2^j - 1), a + w(2^(j+1) - 1)]. When successive panel
/// ratios settle below one the geometric remainder is added. Panels that stop
/// shrinking are reported as divergence.
TailResult integrate_to_infinity(const Integrand& f, double a, double width,
                                 double rel_tol = 1e-12, std::size_t max_panels = 400);

}  // namespace ko::quad
