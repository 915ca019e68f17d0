#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stovol/scalar_resolvent.hpp"
#include "stovol/errors.hpp"
#include "stovol/special_functions.hpp"

#include <cmath>

using namespace stovol;

TEST_CASE("time grid construction and validation") {
    const auto u = TimeGrid::uniform(2.0, 8);
    CHECK(u.nodes.front() == 0.0);
    CHECK(u.nodes.back() == 2.0);
    CHECK(u.n_steps() == 8);
    const auto g = TimeGrid::graded(2.0, 8, 2.0);
    CHECK(g.nodes[1] == doctest::Approx(2.0 / 64.0));
    CHECK(g.nodes.back() == 2.0);
    for (int j = 0; j < g.n_steps(); ++j) CHECK(g.dt(j) > 0.0);
    CHECK_THROWS_AS(TimeGrid::graded(1.0, 8, 0.5), ParameterOutOfRange);
}

TEST_CASE("s(0) = 1 and the mu = 0 degenerate case") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    const auto grid = TimeGrid::uniform(1.0, 64);
    const auto t0 = solve_scalar(k, 0.0, grid);
    for (double v : t0.s) CHECK(v == 1.0);
    for (double v : t0.sdot) CHECK(v == 0.0);
    const auto t1 = solve_scalar(k, 7.0, grid);
    CHECK(t1.s[0] == 1.0);
    CHECK(t1.sdot[0] == 0.0);
}

TEST_CASE("mittag-leffler oracle agreement and convergence order") {
    // |s - E_rho(-mu t^rho)| <= 1e-4 at N = 4096 on [0,2]; error drops by
    // >= 3.5x per grid doubling
    const double rho = 1.5;
    const auto k = KernelSpec::tempered_riesz(rho, 0.0);
    for (double mu : {1.0, 10.0}) {
        double prev_err = 0.0;
        for (int N : {1024, 2048, 4096}) {
            const auto table = solve_scalar(k, mu, TimeGrid::uniform(2.0, N));
            double err = 0.0;
            for (int j = 0; j <= N; ++j) {
                const double t = table.grid->nodes[j];
                err = std::max(err, std::abs(table.s[j] - sf::mittag_leffler(rho, -mu * std::pow(t, rho))));
            }
            if (N == 4096) CHECK(err <= 1e-4);
            if (prev_err > 0.0) CHECK(prev_err / err >= 3.5);
            prev_err = err;
        }
    }
}

TEST_CASE("contraction |s| <= 1 + 1e-6 across kernels and stiffness") {
    const auto grid = TimeGrid::uniform(2.0, 512);
    for (const auto& k : {KernelSpec::tempered_riesz(1.2, 0.0), KernelSpec::tempered_riesz(1.8, 0.0),
                          KernelSpec::finite_history(1.5)}) {
        for (double mu : {1.0, 50.0, 2000.0}) {
            const auto table = solve_scalar(k, mu, grid);
            for (double v : table.s) CHECK(std::abs(v) <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("exact mu-rescaling of the pure Riesz solve") {
    // s_mu on grid == s_1 on the mu^{1/rho}-scaled grid, node by node
    const double rho = 1.5, mu = 37.0;
    const auto k = KernelSpec::tempered_riesz(rho, 0.0);
    const int N = 256;
    const double T = 1.0;
    const auto a = solve_scalar(k, mu, TimeGrid::uniform(T, N));
    const auto b = solve_scalar(k, 1.0, TimeGrid::uniform(T * std::pow(mu, 1.0 / rho), N));
    for (int j = 0; j <= N; ++j) CHECK(std::abs(a.s[j] - b.s[j]) < 1e-10);
}

TEST_CASE("independent quadrature residual of the collocated equation") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    const auto table = solve_scalar(k, 5.0, TimeGrid::uniform(1.0, 256));
    CHECK(independent_residual(k, table) <= 1e-5);
    const auto fh = solve_scalar(KernelSpec::finite_history(1.5), 5.0, TimeGrid::uniform(2.0, 256));
    CHECK(independent_residual(KernelSpec::finite_history(1.5), fh) <= 1e-5);
}

TEST_CASE("sdot decays for large mu t and is recovered from the equation") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    const auto table = solve_scalar(k, 100.0, TimeGrid::uniform(4.0, 2048));
    const int N = table.grid->n_steps();
    CHECK(std::abs(table.sdot[N]) < 1e-3);
    CHECK(std::abs(table.sdot[N]) < std::abs(table.sdot[N / 8]));
}

TEST_CASE("coarse-grid heuristic: flag by default, throw on request") {
    const auto k = KernelSpec::tempered_riesz(1.2, 0.0);
    const auto grid = TimeGrid::uniform(2.0, 64); // heavily under-resolved for mu = 1e5
    const auto table = solve_scalar(k, 1e5, grid);
    CHECK(table.grid_too_coarse);
    for (double v : table.s) CHECK(std::abs(v) <= 1.0 + 1e-6); // hybrid fallback keeps it bounded
    CHECK_THROWS_AS(solve_scalar(k, 1e5, grid, CoarseGridPolicy::Throw), GridTooCoarse);
}

TEST_CASE("stiff graded solves stay bounded through the hybrid fallback") {
    const auto k = KernelSpec::finite_history(1.5);
    const auto grid = TimeGrid::graded(20.0, 600, 2.0);
    const auto table = solve_scalar(k, 1e4, grid); // diverges without the restart
    CHECK(table.grid_too_coarse);
    for (double v : table.s) {
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) <= 1.0 + 1e-6);
    }
}

TEST_CASE("batch solve equals individual solves") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    const auto grid = TimeGrid::graded(4.0, 128, 2.0);
    const std::vector<double> mus = {1.0, 10.0, 100.0};
    const auto batch = solve_scalar_batch(k, mus, grid, CoarseGridPolicy::Flag, 3);
    for (size_t i = 0; i < mus.size(); ++i) {
        const auto single = solve_scalar(k, mus[i], grid);
        for (size_t j = 0; j < single.s.size(); ++j) {
            CHECK(batch[i].s[j] == single.s[j]);       // bit-identical
            CHECK(batch[i].sdot[j] == single.sdot[j]);
        }
    }
}

TEST_CASE("norm scaling slopes for the Riesz kernel, rho = 1.5") {
    const double rho = 1.5;
    const auto k = KernelSpec::tempered_riesz(rho, 0.0);
    const std::vector<double> mus = {1.0, 10.0, 100.0, 1000.0};
    std::vector<TimeGrid> grids(mus.size(), TimeGrid::graded(20.0, 1200, 2.0));
    const auto rep = verify_scalar_estimates(k, mus, grids, rho);
    CHECK(rep.max_abs_s <= 1.0 + 1e-6);
    CHECK(std::abs(rep.slope_s - (-1.0 / rho)) <= 0.05);
    CHECK(std::abs(rep.slope_sdot) <= 0.05);
    CHECK(std::abs(rep.slope_tsdot - (-1.0 / rho)) <= 0.05);
    CHECK(std::abs(rep.slope_tsddot) <= 0.05);
    CHECK(std::abs(rep.slope_t2sddot - (-1.0 / rho)) <= 0.05);
}

TEST_CASE("norm scaling slopes at rho = 1.2 and 1.8 (non-sddot groups)") {
    for (double rho : {1.2, 1.8}) {
        const auto k = KernelSpec::tempered_riesz(rho, 0.0);
        const std::vector<double> mus = {1.0, 10.0, 100.0, 1000.0};
        std::vector<TimeGrid> grids(mus.size(), TimeGrid::graded(20.0, 1200, 2.0));
        const auto rep = verify_scalar_estimates(k, mus, grids, rho);
        CHECK(std::abs(rep.slope_s - (-1.0 / rho)) <= 0.05);
        CHECK(std::abs(rep.slope_sdot) <= 0.05);
        CHECK(std::abs(rep.slope_tsdot - (-1.0 / rho)) <= 0.05);
        if (rho == 1.8) {
            CHECK(std::abs(rep.slope_tsddot) <= 0.1);
            CHECK(std::abs(rep.slope_t2sddot - (-1.0 / rho)) <= 0.1);
        }
    }
}

TEST_CASE("horizon check rejects a short window") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    const std::vector<double> mus = {1.0};
    std::vector<TimeGrid> grids = {TimeGrid::uniform(0.5, 64)}; // |s(0.5)| ~ 0.8
    CHECK_THROWS_AS(verify_scalar_estimates(k, mus, grids, 1.5), HorizonTooShort);
}

TEST_CASE("table evaluation interpolates and guards its range") {
    const auto k = KernelSpec::tempered_riesz(1.5, 0.0);
    const auto table = solve_scalar(k, 1.0, TimeGrid::uniform(1.0, 64));
    CHECK(table.eval_s(0.0) == 1.0);
    CHECK(table.eval_s(1.0) == table.s.back());
    const double mid = table.eval_s(0.5 * (table.grid->nodes[3] + table.grid->nodes[4]));
    CHECK(mid == doctest::Approx(0.5 * (table.s[3] + table.s[4])));
    CHECK_THROWS_AS(table.eval_s(1.5), OutsideTabulatedRange);
}
