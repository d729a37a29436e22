#include "ko/matrixops.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace ko;

namespace {

SymMatrix diag(std::initializer_list<double> d) {
    std::vector<double> v(d);
    return SymMatrix::diagonal(v);
}

}  // namespace

TEST_CASE("from_row_major symmetrizes tiny asymmetry and rejects large") {
    std::vector<double> e{1.0, 2.0, 2.0 + 1e-15, 3.0};
    const auto x = SymMatrix::from_row_major(2, e);
    CHECK(x(0, 1) == x(1, 0));

    std::vector<double> bad{1.0, 2.0, 2.1, 3.0};
    CHECK(test::error_kind([&] { SymMatrix::from_row_major(2, bad); }) == ErrorKind::Input);

    std::vector<double> nan{1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0};
    CHECK(test::error_kind([&] { SymMatrix::from_row_major(2, nan); }) == ErrorKind::Input);

    std::vector<double> short_entries{1.0, 2.0, 3.0};
    CHECK(test::error_kind([&] { SymMatrix::from_row_major(2, short_entries); }) == ErrorKind::Input);
    CHECK(test::error_kind([&] { SymMatrix::identity(0); }).has_value());
}

TEST_CASE("eigenvalues examples") {
    CHECK(eigenvalues(diag({3, 1, 2})).values == std::vector<double>{1, 2, 3});
    CHECK(eigenvalues(SymMatrix::identity(4)).values == std::vector<double>{1, 1, 1, 1});
    std::vector<double> e{0, 1, 1, 0};
    const auto s = eigenvalues(SymMatrix::from_row_major(2, e)).values;
    CHECK(s[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigenvalues match 2x2 closed form and keep the trace") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const auto x = test::random_symmetric(rng, 2, -10, 10);
        const double m = 0.5 * (x(0, 0) + x(1, 1));
        const double d = std::hypot(0.5 * (x(0, 0) - x(1, 1)), x(0, 1));
        const auto s = eigenvalues(x).values;
        CHECK(std::abs(s[0] - (m - d)) <= 1e-12 * std::max(1.0, x.frobenius_norm()));
        CHECK(std::abs(s[1] - (m + d)) <= 1e-12 * std::max(1.0, x.frobenius_norm()));
    }
    for (int t = 0; t < 100; ++t) {
        const auto x = test::random_symmetric(rng, 7, -10, 10);
        const auto s = eigenvalues(x).values;
        CHECK(std::is_sorted(s.begin(), s.end()));
        double sum = 0.0;
        for (double v : s) sum += v;
        CHECK(std::abs(sum - x.trace()) <= 1e-9 * std::max(1.0, x.frobenius_norm()));
    }
}

TEST_CASE("eigenvectors diagonalize") {
    std::mt19937_64 rng(5);
    const auto x = test::random_symmetric(rng, 6, -3, 3);
    const auto es = eigen_decompose(x);
    const std::size_t n = x.n();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double xv = 0.0;
            for (std::size_t r = 0; r < n; ++r) xv += x(i, r) * es.vectors[r * n + j];
            CHECK(std::abs(xv - es.spectrum.values[j] * es.vectors[i * n + j]) < 1e-10);
        }
    }
}

TEST_CASE("pplus_k examples and range") {
    CHECK(pplus_k(SymMatrix::identity(3), 2) == doctest::Approx(2.0));
    CHECK(pplus_k(diag({-5, 0, 7}), 1) == doctest::Approx(7.0));
    CHECK(pplus_k(diag({-1, 2, 3}), 2) == doctest::Approx(5.0));
    CHECK(test::error_kind([] { pplus_k(SymMatrix::identity(3), 0); }) == ErrorKind::Parameter);
    CHECK(test::error_kind([] { pplus_k(SymMatrix::identity(3), 4); }) == ErrorKind::Parameter);
}

TEST_CASE("mplus_01 examples and zero threshold") {
    CHECK(mplus_01(diag({-1, 2, 3})) == doctest::Approx(5.0));
    CHECK(mplus_01(SymMatrix::identity(3).scaled(-1.0)) == 0.0);
    CHECK(mplus_01(diag({1, 4})) == doctest::Approx(5.0));
    CHECK(mplus_01(diag({1e-14, 2})) == 2.0);
    CHECK(mplus_01(diag({1e-14, 2}), 0.0) == doctest::Approx(2.0 + 1e-14));
}

TEST_CASE("mminus examples and parameter validation") {
    CHECK(mminus(diag({-1, 3}), PucciParams(1, 2)) == doctest::Approx(1.0));
    CHECK(mminus(SymMatrix::identity(2).scaled(-1.0), PucciParams(1, 2)) == doctest::Approx(-4.0));
    CHECK(mminus(diag({1, 2}), PucciParams(0.5, 3)) == doctest::Approx(1.5));
    CHECK(test::error_kind([] { PucciParams(0.0, 1.0); }) == ErrorKind::Parameter);
    CHECK(test::error_kind([] { PucciParams(2.0, 1.0); }) == ErrorKind::Parameter);
}

TEST_CASE("subspace_trace examples") {
    const auto x = diag({1, 2, 3});
    CHECK(subspace_trace(x, Frame({{0, 0, 1}})) == doctest::Approx(3.0));
    CHECK(subspace_trace(x, Frame({{1, 0, 0}})) == doctest::Approx(1.0));
    CHECK(test::error_kind([] { Frame({{1, 0, 0}, {1, 1, 0}}); }) == ErrorKind::Input);
    CHECK(test::error_kind([&] { subspace_trace(x, Frame({{1, 0}})); }).has_value());
}

TEST_CASE("random frames never exceed pplus_k and the top frame attains it") {
    std::mt19937_64 rng(11);
    const auto x = test::random_symmetric(rng, 5, -10, 10);
    const double p2 = pplus_k(x, 2);
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100; ++t) {
        const double v = subspace_trace(x, test::random_frame(rng, 5, 2));
        CHECK(v <= p2 + 1e-9);
        best = std::max(best, v);
    }
    CHECK(best > p2 - 0.5 * (std::abs(p2) + 10.0));
    CHECK(std::abs(subspace_trace(x, top_eigen_frame(x, 2)) - p2) <= 1e-9);
}

TEST_CASE("operator properties on seeded random matrices") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ut(0.0, 5.0);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 6);
        const auto x = test::random_symmetric(rng, n, -10, 10);
        const auto y = test::random_psd(rng, n);
        const double tol = 1e-9 * std::max(1.0, x.frobenius_norm() + y.frobenius_norm());
        const double m = mplus_01(x);
        for (std::size_t k = 1; k <= n; ++k) {
            CHECK(pplus_k(x, k) <= m + tol);
            const double d = pplus_k(x + y, k) - pplus_k(x, k);
            CHECK(d >= -tol);
            CHECK(d <= y.trace() + tol);
        }
        CHECK(std::abs(pplus_k(x, n) - x.trace()) <= tol);
        const double dm = mplus_01(x + y) - m;
        CHECK(dm >= -tol);
        CHECK(dm <= y.trace() + tol);
        const PucciParams p(0.5, 2.0);
        CHECK(mminus(x, p) <= mminus(x + y, p) + tol);
        const double s = ut(rng);
        CHECK(std::abs(pplus_k(x.scaled(s), 1) - s * pplus_k(x, 1)) <= s * tol + tol);
        CHECK(std::abs(mplus_01(x.scaled(s)) - s * m) <= s * tol + tol);
        CHECK(std::abs(mminus(x.scaled(s), p) - s * mminus(x, p)) <= s * tol + tol);
    }
}

TEST_CASE("evaluate dispatches to the named operator") {
    const auto x = diag({-1, 2, 3});
    CHECK(evaluate(PPlusK{1}, x) == doctest::Approx(3.0));
    CHECK(evaluate(MPlus01{}, x) == doctest::Approx(5.0));
    CHECK(evaluate(MMinus{PucciParams(1, 2)}, x) == doctest::Approx(3.0));
}
