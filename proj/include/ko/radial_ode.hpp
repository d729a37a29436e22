#pragma once

#include "ko/nonlinearity.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ko {

/// Parameters for integrating phi'' + (c-1)/r phi' = f(phi), phi(0) = a, phi'(0) = 0.
struct ShootConfig {
    double c = 1.0;
    double a = 0.0;
    double r_max = 10.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// phi above which a blow-up bracket is attempted.
    double blowup_cap = 1e12;
    /// Steps below min_step * max(1, r) count as a collapse.
    double min_step = 1e-14;

    /// Throws a parameter error naming the offending field.
    void validate() const;
};

struct ProfileSample {
    double r;
    double phi;
    double dphi;
    double ddphi;
};

enum class ProfileStatus { Global, BlowUp };

const char* to_string(ProfileStatus s) noexcept;

/// Sampled radial solution. samples.front() is (0, a, 0, f(a)/c) and r is
/// strictly increasing. For Global the solution exists at least up to
/// samples.back().r; for BlowUp the maximal radius lies in [r_lo, r_hi].
struct RadialProfile {
    double c = 1.0;
    double a = 0.0;
    std::vector<ProfileSample> samples;
    ProfileStatus status = ProfileStatus::Global;
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::string spec_id;
    /// The nonlinearity that generated the profile, when known. Used to
    /// recover phi'' from the equation between samples.
    std::optional<NonlinearitySpec> spec;

    double r_end() const noexcept { return samples.back().r; }
};

/// phi, phi', phi'' at an arbitrary radius inside the sampled range.
/// phi and phi' come from shape-preserving cubic Hermite interpolation.
ProfileSample evaluate_profile(const RadialProfile& profile, double r);

/// Adaptive Dormand-Prince 5(4) integration started from the series
/// phi = a + f(a) r^2 / (2c) + O(r^4) on [0, h0].
RadialProfile shoot(const NonlinearitySpec& spec, const ShootConfig& cfg);

struct RadiusBounds {
    bool bounded = false;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t panels = 0;
    std::string method;
};

/// lower = integral over [a, inf) of (2 F(phi; a))^(-1/2), upper = sqrt(c) * lower.
/// Unbounded when the Keller-Osserman condition holds.
RadiusBounds radius_bounds(const NonlinearitySpec& spec, double a, double c);

/// Exact blow-up radius for c = 1 (+inf when no finite radius exists).
double energy_radius_c1(const NonlinearitySpec& spec, double a);

struct BlowupEstimate {
    ProfileStatus status = ProfileStatus::Global;
    /// Midpoint of the bracket for BlowUp; the horizon for Global.
    double radius = 0.0;
    double r_lo = 0.0;
    double r_hi = 0.0;
    RadiusBounds bounds;
};

/// Shoots with a horizon past the radius upper bound when that bound is finite.
BlowupEstimate estimate_blowup_radius(const NonlinearitySpec& spec, const ShootConfig& cfg);

struct InvariantReport {
    bool ok = true;
    /// Largest violation of each inequality, relative to max(1, f(phi)).
    double monotone = 0.0;          // -phi'
    double convex = 0.0;            // -phi''
    double eigen_comparison = 0.0;  // phi'/r - f/c
    double lower_second = 0.0;      // f/c - phi''
    double upper_second = 0.0;      // phi'' - f
    double last = 0.0;              // phi'/r - phi''
    double flux = 0.0;              // decrease of r^(c-1) phi'
    std::size_t checked = 0;
};

/// Sample-wise check of phi' >= 0, phi'' >= 0, phi'/r <= f/c,
/// f/c <= phi'' <= f, phi'' >= phi'/r and monotone r^(c-1) phi'.
InvariantReport check_profile_invariants(const RadialProfile& profile,
                                         const NonlinearitySpec& spec, double tol = 1e-9);

}  // namespace ko
