#pragma once

#include "ko/error.hpp"
#include "ko/matrixops.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace test {

// Reference values computed once with 30-digit mpmath quadrature and frozen here.
namespace frozen {
inline constexpr double kPiOverSqrt2 = 2.22144146907918312350794049503;
// sqrt(2) * integral over [1, inf) of (p^4 - 1)^(-1/2)
inline constexpr double kQuarticRadiusA1 = 1.85407467730137190845397187545;
// (e - 1)^2
inline constexpr double kBetaExpMargin = 2.95249244201255975650985251787;

struct LowerBound {
    double gamma;
    double eps;
    double a;
    double lower;  // integral over [a, inf) of (2 F(p; a))^(-1/2), f = t^gamma + eps
};
inline constexpr LowerBound kLowerBounds[] = {
    {1.5, 0.1, 0, 7.90064867464708410789832851228}, {1.5, 0.1, 1, 4.99681599821894126302923218323},
    {1.5, 1.0, 0, 5.38264928245035157180495194292}, {1.5, 1.0, 1, 4.58765464965855272561328381663},
    {2.0, 0.1, 0, 6.13652536829219510530545571633}, {2.0, 0.1, 1, 2.92017852435278699998211044222},
    {2.0, 1.0, 0, 3.45082180766962799124046489096}, {2.0, 1.0, 1, 2.59259082455475970792615039770},
    {3.0, 0.1, 0, 5.38264928245035149772193016254}, {3.0, 0.1, 1, 1.81241856245185871948450982562},
    {3.0, 1.0, 0, 2.49840448046753887165804511004}, {3.0, 1.0, 1, 1.56381820405366085011602891563},
};

// PowerPlusEps(3, 1), a = -5 .. 4
inline constexpr double kCubicLowerByA[] = {
    4.33962540608709078755750166895, 4.06283467506761490256534899780,
    3.75918112698358641487618249479, 3.41803966904589624440865074304,
    3.01831812739766174933065454294, 2.49840448046753887165804511004,
    1.56381820405366085011602891563, 0.901337521527265403716011465853,
    0.612705569081314642287413908555, 0.461815505020790394236500859552,
};
}  // namespace frozen

inline double max_abs_entry(const ko::SymMatrix& x) {
    double m = 0.0;
    for (double v : x.entries()) m = std::max(m, std::abs(v));
    return m;
}

inline ko::SymMatrix random_symmetric(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    auto x = ko::SymMatrix::zeros(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) x.set(i, j, u(rng));
    return x;
}

// G^T G for a Gaussian G.
inline ko::SymMatrix random_psd(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> gm(n * n);
    for (double& v : gm) v = g(rng);
    auto y = ko::SymMatrix::zeros(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += gm[r * n + i] * gm[r * n + j];
            y.set(i, j, s);
        }
    return y;
}

// Modified Gram-Schmidt on Gaussian vectors.
inline ko::Frame random_frame(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> vs;
    while (vs.size() < k) {
        std::vector<double> v(n);
        for (double& x : v) x = g(rng);
        for (const auto& w : vs) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += v[i] * w[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * w[i];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm < 1e-6) continue;
        for (double& x : v) x /= nrm;
        vs.push_back(std::move(v));
    }
    return ko::Frame(std::move(vs));
}

// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double brute_min(const std::function<double(double)>& f, double lo, double hi, int samples) {
    double m = f(hi);
    for (int i = 0; i <= samples; ++i) m = std::min(m, f(lo + (hi - lo) * i / samples));
    return m;
}

template <class Fn>
std::optional<ko::ErrorKind> error_kind(Fn&& fn) {
    try {
        fn();
    } catch (const ko::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

}  // namespace test
