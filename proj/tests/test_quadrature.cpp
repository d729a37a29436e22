#include "ko/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ko::quad;

TEST_CASE("integrate: smooth and endpoint-singular integrands") {
    const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

    const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-9));

    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("integrate_to_infinity: convergent tails") {
    const auto e = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0);
    CHECK(e.status == TailStatus::Converged);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-11));

    const auto p = integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
    CHECK(p.status == TailStatus::Converged);
    CHECK(p.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));

    // Slow algebraic decay relies on the geometric remainder.
    const auto q = integrate_to_infinity([](double x) { return std::pow(1.0 + x, -1.5); }, 0.0, 1.0);
    CHECK(q.status == TailStatus::Converged);
    CHECK(q.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("integrate_to_infinity: divergent tails are reported") {
    CHECK(integrate_to_infinity([](double x) { return 1.0 / (1.0 + x); }, 0.0, 1.0).status ==
          TailStatus::Diverged);
    CHECK(integrate_to_infinity([](double x) { return 1.0 / std::sqrt(1.0 + x); }, 0.0, 1.0).status ==
          TailStatus::Diverged);
    CHECK(integrate_to_infinity([](double) { return 1.0; }, 0.0, 1.0).status != TailStatus::Converged);
}
