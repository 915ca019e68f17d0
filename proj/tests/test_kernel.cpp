#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stovol/kernel.hpp"
#include "stovol/errors.hpp"
#include "stovol/quadrature.hpp"
#include "stovol/special_functions.hpp"

#include <cmath>

using namespace stovol;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("riesz kernel point values") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    // b(1) = 1 / Gamma(0.5) = 1 / sqrt(pi)
    CHECK(k.eval(1.0) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-13));
    CHECK_THROWS_AS(k.eval(0.0), NonPositiveTime);
    CHECK_THROWS_AS(k.eval(-1.0), NonPositiveTime);
}

TEST_CASE("finite-history kernel support and cutoff continuity") {
    const auto k = KernelSpec::finite_history(1.5);
    CHECK(k.eval(1.5) == 0.0);
    CHECK(k.eval(1.0) == 0.0);
    CHECK(k.eval(1.0 - 1e-9) == doctest::Approx(0.0).epsilon(1e-18));
    CHECK(k.eval(0.5) > 0.0);
    const auto k14 = KernelSpec::finite_history(1.4);
    CHECK(k14.eval(2.0) == 0.0);
}

TEST_CASE("riesz laplace transform closed form") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    CHECK(std::abs(k.laplace(1.0) - complexd(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(k.laplace(2.0) - complexd(std::pow(2.0, -0.5), 0.0)) < 1e-14);
    CHECK_THROWS_AS(k.laplace(complexd(-1.0, 0.0)), NonanalyticPoint);
}

TEST_CASE("laplace example kernel value from its formula") {
    const auto k = KernelSpec::laplace_example();
    // bhat(1) = 1 / (1 + 0.4 (2^-5 - 1)) = 1 / 0.6125
    CHECK(std::abs(k.laplace(1.0) - complexd(1.0 / 0.6125, 0.0)) < 1e-13);
    CHECK(k.has_closed_form_derivatives());
}

TEST_CASE("riesz laplace equals the time-domain quadrature on a half-plane grid") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    int n = 0;
    for (double re : {0.3, 1.0, 3.0, 10.0}) {
        for (double im : {0.0, 0.5, 2.0, 8.0, -3.0}) {
            const complexd lam(re, im);
            const complexd closed = k.laplace(lam);
            const complexd quad = k.laplace_by_quadrature(lam, 1e-12);
            CHECK(std::abs(closed - quad) <= 1e-8 * std::max(1.0, std::abs(closed)));
            ++n;
        }
    }
    CHECK(n == 20);
}

TEST_CASE("tempered riesz laplace vs quadrature, eta > 0") {
    const auto k = KernelSpec::tempered_riesz(1.3, 2.0);
    for (double re : {0.5, 2.0}) {
        const complexd lam(re, 1.0);
        CHECK(std::abs(k.laplace(lam) - k.laplace_by_quadrature(lam, 1e-12)) < 1e-9);
    }
}

TEST_CASE("finite-history laplace closed form vs quadrature") {
    const auto k = KernelSpec::finite_history(1.4);
    for (double im : {0.0, 1.0, 9.0, 27.0}) {
        const complexd lam(0.8, im);
        const complexd a = k.laplace(lam);
        const complexd b = k.laplace_by_quadrature(lam, 1e-12);
        CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("kernel moments agree with quadrature of the definition") {
    for (const auto& k : {KernelSpec::tempered_riesz(1.5, 0.0), KernelSpec::tempered_riesz(1.3, 2.0),
                          KernelSpec::finite_history(1.5)}) {
        for (double t : {0.3, 0.9, 2.0}) {
            const double B = quad::integrate_endpoint_singular([&](double s) { return k.eval(s); }, 0.0, t,
                                                               {1e-12, 0.0, 4000});
            const double M1 = quad::integrate_endpoint_singular([&](double s) { return s * k.eval(s); }, 0.0,
                                                                t, {1e-12, 0.0, 4000});
            const double M2 = quad::integrate_endpoint_singular([&](double s) { return s * s * k.eval(s); },
                                                                0.0, t, {1e-12, 0.0, 4000});
            const auto m = k.moments(t);
            CHECK(m.B == doctest::Approx(B).epsilon(1e-9));
            CHECK(m.M1 == doctest::Approx(M1).epsilon(1e-9));
            CHECK(m.M2 == doctest::Approx(M2).epsilon(1e-9));
            // primitive of the primitive by nesting
            const double B1 = quad::integrate([&](double s) { return k.primitive(s); }, 0.0, t,
                                              {1e-11, 0.0, 4000});
            CHECK(m.B1 == doctest::Approx(B1).epsilon(1e-8));
        }
    }
}

TEST_CASE("every kernel variant is locally integrable") {
    for (const auto& k : {KernelSpec::tempered_riesz(1.2, 0.0), KernelSpec::finite_history(1.3)}) {
        const double mass = quad::integrate_endpoint_singular([&](double s) { return std::abs(k.eval(s)); },
                                                              0.0, 1e-2, {1e-10, 0.0, 4000});
        CHECK(std::isfinite(mass));
        CHECK(mass > 0.0);
        CHECK(mass == doctest::Approx(k.primitive(1e-2)).epsilon(1e-6));
    }
}

TEST_CASE("tabulated kernel interpolation, range errors and moments") {
    // tabulate t on [0.1, 2] and sample a smooth positive function
    std::vector<double> t, b;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.1 + 1.9 * i / 200.0);
        b.push_back(std::exp(-t.back()));
    }
    const auto k = KernelSpec::tabulated(t, b);
    CHECK(k.eval(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
    CHECK_THROWS_AS(k.eval(0.05), OutsideTabulatedRange);
    CHECK_THROWS_AS(k.eval(2.5), OutsideTabulatedRange);
    // piecewise-exact moments vs quadrature of the interpolant
    const double B = quad::integrate([&](double s) { return k.eval(s); }, 0.1, 1.7, {1e-11, 0.0, 4000});
    CHECK(k.primitive(1.7) == doctest::Approx(B).epsilon(1e-7));
    // Laplace via per-interval closed form is close to exp-kernel transform
    const complexd lam(1.0, 0.5);
    const complexd truth = (std::exp(-(lam + 1.0) * 0.1) - std::exp(-(lam + 1.0) * 2.0)) / (lam + 1.0);
    CHECK(std::abs(k.laplace(lam) - truth) < 2e-4);
}

TEST_CASE("finite-history transform derivatives stay consistent across the asymptotic seam") {
    const auto k = KernelSpec::finite_history(1.5);
    for (double kk : {60.0, 99.0, 101.0, 300.0, 1e4, 1e7}) {
        const complexd lam(1e-8, kk);
        const double h = kk * 1e-6;
        const complexd fd = (k.laplace(complexd(1e-8, kk + h)) - k.laplace(complexd(1e-8, kk - h))) /
                            (complexd(0.0, 2.0 * h));
        const complexd cf = k.laplace_derivative(1, lam);
        CHECK(std::abs(cf - fd) <= 2e-4 * std::abs(cf));
    }
}
