#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stovol/certify.hpp"
#include "stovol/errors.hpp"
#include "stovol/quadrature.hpp"

#include <cmath>

using namespace stovol;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("sector angle recovers rho for the pure Riesz kernel") {
    for (double rho : {1.2, 1.5, 1.8}) {
        const auto res = sector_angle(KernelSpec::tempered_riesz(rho, 0.0));
        CHECK(res.rho_sector == doctest::Approx(rho).epsilon(1e-3));
        CHECK(res.angle < kPi / 2.0);
        CHECK(res.interior_max <= res.angle + 1e-9); // maximum principle
    }
}

TEST_CASE("sector angle of the tempered kernel degrades to rho -> 1 as rho -> 1") {
    const auto res = sector_angle(KernelSpec::tempered_riesz(1.02, 0.0));
    CHECK(res.rho_sector == doctest::Approx(1.02).epsilon(1e-3));
}

TEST_CASE("laplace example kernel: sector rho near the reported 1.874") {
    const auto res = sector_angle(KernelSpec::laplace_example());
    CHECK(res.rho_sector == doctest::Approx(1.874).epsilon(0.01 / 1.874));
    // the sup sits at a finite boundary frequency for this kernel
    CHECK(res.k_at_max > 0.1);
    CHECK(res.k_at_max < 10.0);
}

TEST_CASE("k-regularity ratios for the Riesz kernel") {
    const auto sup = check_k_regularity(KernelSpec::tempered_riesz(1.5, 0.0), 2);
    REQUIRE(sup.size() == 3);
    CHECK(sup[0] == doctest::Approx(1.0).epsilon(1e-10));            // j = 0 is the definition
    CHECK(sup[1] == doctest::Approx(0.5).epsilon(1e-6));             // |1 - rho|
    CHECK(sup[2] == doctest::Approx(0.5 * 1.5).epsilon(1e-6));       // |(1-rho)(-rho)|
}

TEST_CASE("k-regularity of the finite-history kernel is finite") {
    const auto sup = check_k_regularity(KernelSpec::finite_history(1.4), 2);
    for (double v : sup) {
        CHECK(std::isfinite(v));
        CHECK(v < 100.0);
    }
}

TEST_CASE("growth products are exactly scale invariant for the pure Riesz kernel") {
    // default mu window [1e6, 1e12]; the eps boundary offset perturbs the
    // products only at O((eps/k*)^2)
    const auto rep = check_growth_conditions(KernelSpec::tempered_riesz(1.5, 0.0), {1.5});
    double mn1 = 1e300, mx1 = 0;
    for (double p : rep.product1) {
        mn1 = std::min(mn1, p);
        mx1 = std::max(mx1, p);
    }
    CHECK(mx1 / mn1 - 1.0 < 1e-6);
    double mn2 = 1e300, mx2 = 0;
    for (size_t i = 0; i < rep.mu.size(); ++i) {
        const double p = std::pow(rep.mu[i], 1.0 + 1.0 / 1.5) * rep.integral2[i];
        mn2 = std::min(mn2, p);
        mx2 = std::max(mx2, p);
    }
    CHECK(mx2 / mn2 - 1.0 < 1e-6);
    CHECK(rep.candidates.at(0).pass);
}

TEST_CASE("growth boundary for the Riesz(1.5) kernel sits at 1.50") {
    std::vector<double> cands;
    for (int i = 0; i <= 20; ++i) cands.push_back(1.40 + 0.01 * i);
    const auto rep = check_growth_conditions(KernelSpec::tempered_riesz(1.5, 0.0), cands);
    CHECK(rep.rho_growth == doctest::Approx(1.50).epsilon(1e-9));
    CHECK(rep.rho_growth_fit == doctest::Approx(1.5).epsilon(2e-3));
}

TEST_CASE("laplace example: growth rho 1.4, below the sector value") {
    std::vector<double> cands;
    for (int i = 0; i <= 10; ++i) cands.push_back(1.35 + 0.01 * i);
    const auto rep = check_growth_conditions(KernelSpec::laplace_example(), cands);
    CHECK(rep.rho_growth >= 1.35);
    CHECK(rep.rho_growth <= 1.45);
    CHECK(std::abs(rep.rho_growth - 1.4) <= 0.05);
    CHECK(rep.product1_bounded);
    // the sharp growth exponent is well below the sectorial 1.874: the
    // product at the sector rho decays instead of staying flat
    const auto sec = sector_angle(KernelSpec::laplace_example());
    CHECK(rep.rho_growth < sec.rho_sector - 0.4);
    const double slope_at_sector = rep.i2_tail_slope + 1.0 + 1.0 / sec.rho_sector;
    CHECK(slope_at_sector < -0.1);
}

TEST_CASE("monotone order") {
    CHECK(check_monotonicity(KernelSpec::tempered_riesz(1.5, 0.0)) == 4);
    CHECK(check_monotonicity(KernelSpec::finite_history(1.5)) == 4);
    CHECK(check_monotonicity(KernelSpec::finite_history(1.3)) == 4);
    // cos on (0, 10): positivity already fails
    std::vector<double> t, b;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(1e-3 + i * (10.0 - 1e-3) / 400.0);
        b.push_back(std::cos(t.back()));
    }
    CHECK(check_monotonicity(KernelSpec::tabulated(t, b), 4, t) == 0);
}

TEST_CASE("b-smooth quotient: constant for Riesz, bounded for finite history") {
    const auto r = check_b_smooth(KernelSpec::tempered_riesz(1.5, 0.0));
    CHECK(r.bounded);
    // closed form (rho-1)/(rho(2-rho)) = 2/3 at rho = 1.5
    for (double q : r.ratio) CHECK(q == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    // quadrature oracle at one interior point: numerator and denominator
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    const double t0 = 0.37;
    const double num = quad::integrate_endpoint_singular([&](double s) { return s * k.eval(s); }, 0.0, t0,
                                                         {1e-11, 0.0, 4000}) / t0;
    const double den = quad::integrate_endpoint_singular(
        [&](double s) { return -s * k.eval_derivative(s); }, 0.0, t0, {1e-11, 0.0, 4000});
    CHECK(num / den == doctest::Approx(2.0 / 3.0).epsilon(1e-7));

    const auto fh = check_b_smooth(KernelSpec::finite_history(1.5));
    CHECK(fh.bounded);
    for (double q : fh.ratio) CHECK(q >= 0.0);
}

TEST_CASE("L1 norm scaling slopes") {
    const auto a = l1_norm_scaling(KernelSpec::tempered_riesz(1.5, 0.0));
    CHECK(a.slope == doctest::Approx(0.5).epsilon(0.01 / 0.5));
    const auto b = l1_norm_scaling(KernelSpec::tempered_riesz(1.5, 2.0), 1e-4, 0.1);
    CHECK(std::abs(b.slope - 0.5) <= 0.02);
    // finite history beyond the cutoff: the norm is constant
    const auto c = l1_norm_scaling(KernelSpec::finite_history(1.5), 1.5, 20.0, 9);
    CHECK(std::abs(c.slope) < 1e-12);
}

TEST_CASE("smallest Lp membership is 1 for the shipped kernels") {
    CHECK(smallest_lp_membership(KernelSpec::tempered_riesz(1.5, 0.0)) == 1);
    CHECK(smallest_lp_membership(KernelSpec::laplace_example()) == 1);
}

TEST_CASE("full certification bundle for the finite-history kernel") {
    CertifyOptions opt;
    opt.rho_candidates = {1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9};
    const auto rep = certify_kernel(KernelSpec::finite_history(1.5), opt);
    CHECK(rep.monotone_order == 4);
    CHECK(std::abs(rep.rho_sector - 1.5) < 0.02);
    CHECK(rep.all_pass);
    // serialization has one object per condition
    for (const auto& c : rep.conditions) CHECK(!c.name.empty());
}
