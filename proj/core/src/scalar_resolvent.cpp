#include "stovol/scalar_resolvent.hpp"

#include "stovol/errors.hpp"
#include "stovol/parallel.hpp"
#include "stovol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stovol {

namespace {
constexpr double kBlowupGuard = 1.02; // |s| beyond this means the scheme went unstable
}

TimeGrid TimeGrid::uniform(double T, int n_steps) {
    if (!(T > 0) || n_steps < 1) throw ParameterOutOfRange("TimeGrid::uniform: need T > 0, n_steps >= 1");
    TimeGrid g;
    g.horizon = T;
    g.kind = Kind::Uniform;
    g.nodes.resize(n_steps + 1);
    for (int j = 0; j <= n_steps; ++j) g.nodes[j] = T * j / n_steps;
    g.nodes.back() = T;
    return g;
}

TimeGrid TimeGrid::graded(double T, int n_steps, double gexp) {
    if (!(T > 0) || n_steps < 1 || !(gexp >= 1.0))
        throw ParameterOutOfRange("TimeGrid::graded: need T > 0, n_steps >= 1, grading >= 1");
    TimeGrid g;
    g.horizon = T;
    g.kind = Kind::Graded;
    g.grading = gexp;
    g.nodes.resize(n_steps + 1);
    for (int j = 0; j <= n_steps; ++j) g.nodes[j] = T * std::pow(static_cast<double>(j) / n_steps, gexp);
    g.nodes.back() = T;
    return g;
}

bool TimeGrid::same_nodes(const TimeGrid& o) const {
    return nodes.size() == o.nodes.size() && std::equal(nodes.begin(), nodes.end(), o.nodes.begin());
}

namespace {

double interp_table(const std::vector<double>& nodes, const std::vector<double>& y, double t) {
    if (t < nodes.front() || t > nodes.back() * (1.0 + 1e-12))
        throw OutsideTabulatedRange("resolvent table evaluated outside [0, T]");
    t = std::min(t, nodes.back());
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    int m = static_cast<int>(it - nodes.begin()) - 1;
    m = std::clamp(m, 0, static_cast<int>(nodes.size()) - 2);
    const double w = (t - nodes[m]) / (nodes[m + 1] - nodes[m]);
    return y[m] * (1.0 - w) + y[m + 1] * w;
}

// Kernel moment values at the lags t_j - t_m, m = 0..j, with a uniform-grid
// fast path that shares one precomputed lag table.
struct MomentSweep {
    const KernelSpec& kernel;
    const TimeGrid& grid;
    bool uniform;
    std::vector<KernelMoments> lag; // uniform: moments at l*dt, l = 0..N
    std::vector<KernelMoments> row; // graded scratch: moments at t_j - t_m

    MomentSweep(const KernelSpec& k, const TimeGrid& g) : kernel(k), grid(g) {
        uniform = (g.kind == TimeGrid::Kind::Uniform);
        const int N = g.n_steps();
        if (uniform) {
            lag.resize(N + 1);
            const double dt = g.horizon / N;
            for (int l = 0; l <= N; ++l) lag[l] = kernel.moments(l * dt);
        } else {
            row.resize(N + 1);
        }
    }

    // moments at t_j - t_m for m = 0..j, returned as a pointer so the
    // uniform path is a reversed view shift
    const KernelMoments& at(int j, int m) const { return uniform ? lag[j - m] : row[m]; }
    void prepare(int j) {
        if (uniform) return;
        for (int m = 0; m < j; ++m) row[m] = kernel.moments(grid.nodes[j] - grid.nodes[m]);
        row[j] = KernelMoments{}; // zero lag
    }
};

struct BatchState {
    std::vector<double> mus;
    std::vector<std::vector<double>> s, sdot, sddot;
    std::vector<char> flagged, hybrid;
};

// One chunk of modes advanced together through the shared j-sweep.
// `use_const(k, m)` selects the downgraded piecewise-constant representation
// for interval m of mode k (hybrid modes only).
void sweep_chunk(const KernelSpec& kernel, const TimeGrid& grid, BatchState& st, const std::vector<int>& modes,
                 const std::vector<double>& vstep) {
    const int N = grid.n_steps();
    const auto& t = grid.nodes;
    MomentSweep ms(kernel, grid);

    std::vector<double> P(N), Q(N), I0(N);
    std::vector<char> active(modes.size(), 1), bad(modes.size(), 0);

    auto run_pass = [&](bool hybrid_pass) {
        for (int j = 1; j <= N; ++j) {
            ms.prepare(j);
            for (int m = 0; m < j; ++m) {
                const KernelMoments& mc = ms.at(j, m); // lag c = t_j - t_m
                const KernelMoments& ma = ms.at(j, m + 1);
                const double a = t[j] - t[m + 1], c = t[j] - t[m], d = t[m + 1] - t[m];
                const double i0 = mc.B1 - ma.B1;
                const double i1 = (c * c * mc.B - a * a * ma.B) / 2.0 - (mc.M2 - ma.M2) / 2.0;
                I0[m] = i0;
                P[m] = (i1 - a * i0) / d;
                Q[m] = (c * i0 - i1) / d;
            }
            for (size_t ci = 0; ci < modes.size(); ++ci) {
                if (!active[ci]) continue;
                const int k = modes[ci];
                if (hybrid_pass != (st.hybrid[k] != 0)) continue;
                const double mu = st.mus[k];
                auto& s = st.s[k];
                double acc = 0.0;
                if (!hybrid_pass) {
                    for (int m = 0; m < j - 1; ++m) acc += P[m] * s[m] + Q[m] * s[m + 1];
                    acc += P[j - 1] * s[j - 1];
                    s[j] = (1.0 - mu * acc) / (1.0 + mu * Q[j - 1]);
                } else {
                    for (int m = 0; m < j - 1; ++m) {
                        if (mu * vstep[m] > 1.0)
                            acc += I0[m] * s[m + 1];
                        else
                            acc += P[m] * s[m] + Q[m] * s[m + 1];
                    }
                    const bool last_const = mu * vstep[j - 1] > 1.0;
                    if (!last_const) acc += P[j - 1] * s[j - 1];
                    s[j] = (1.0 - mu * acc) / (1.0 + mu * (last_const ? I0[j - 1] : Q[j - 1]));
                }
                if (!hybrid_pass && std::abs(s[j]) > kBlowupGuard) {
                    bad[ci] = 1;
                    active[ci] = 0;
                }
            }
        }
    };

    run_pass(false);
    bool any_bad = false;
    for (size_t ci = 0; ci < modes.size(); ++ci) {
        if (bad[ci]) {
            any_bad = true;
            const int k = modes[ci];
            st.hybrid[k] = 1;
            std::fill(st.s[k].begin() + 1, st.s[k].end(), 0.0);
            active[ci] = 1;
        }
    }
    if (any_bad) run_pass(true);

    // derivative recovery: sdot from the b-convolution of the stored
    // representation, sddot from b(t_j) + b * (interpolant derivative)
    std::vector<double> p(N), q(N), J0(N);
    for (int j = 1; j <= N; ++j) {
        ms.prepare(j);
        for (int m = 0; m < j; ++m) {
            const KernelMoments& mc = ms.at(j, m);
            const KernelMoments& ma = ms.at(j, m + 1);
            const double a = t[j] - t[m + 1], c = t[j] - t[m], d = t[m + 1] - t[m];
            const double j0 = mc.B - ma.B;
            const double j1 = mc.M1 - ma.M1;
            J0[m] = j0;
            p[m] = (j1 - a * j0) / d;
            q[m] = (c * j0 - j1) / d;
        }
        double btj = 0.0;
        if (kernel.has_time_domain()) {
            try {
                btj = kernel.eval(t[j]);
            } catch (const OutsideTabulatedRange&) {
                btj = 0.0;
            }
        }
        for (const int k : modes) {
            const double mu = st.mus[k];
            const auto& s = st.s[k];
            const bool hyb = st.hybrid[k] != 0;
            double acc = 0.0, acc2 = 0.0;
            for (int m = 0; m < j; ++m) {
                if (hyb && mu * vstep[m] > 1.0)
                    acc += J0[m] * s[m + 1];
                else
                    acc += p[m] * s[m] + q[m] * s[m + 1];
                acc2 += J0[m] * (s[m + 1] - s[m]) / (t[m + 1] - t[m]);
            }
            st.sdot[k][j] = -mu * acc;
            st.sddot[k][j] = -mu * (btj + acc2);
        }
    }
}

} // namespace

double ScalarResolventTable::eval_s(double t) const { return interp_table(grid->nodes, s, t); }
double ScalarResolventTable::eval_sdot(double t) const { return interp_table(grid->nodes, sdot, t); }

std::vector<ScalarResolventTable> solve_scalar_batch(const KernelSpec& kernel, const std::vector<double>& mus,
                                                     const TimeGrid& grid, CoarseGridPolicy policy,
                                                     int n_threads) {
    const int N = grid.n_steps();
    const int M = static_cast<int>(mus.size());
    for (double mu : mus)
        if (mu < 0.0) throw ParameterOutOfRange("solve_scalar: mu must be >= 0");

    // per-step overload heuristic mu * ||b||_L1(0,dt) * dt
    std::vector<double> vstep(N);
    for (int m = 0; m < N; ++m) {
        const double d = grid.dt(m);
        vstep[m] = kernel.primitive(d) * d;
    }

    BatchState st;
    st.mus = mus;
    st.s.assign(M, std::vector<double>(N + 1, 0.0));
    st.sdot.assign(M, std::vector<double>(N + 1, 0.0));
    st.sddot.assign(M, std::vector<double>(N + 1, 0.0));
    st.flagged.assign(M, 0);
    st.hybrid.assign(M, 0);
    for (int k = 0; k < M; ++k) {
        st.s[k][0] = 1.0;
        for (int m = 0; m < N; ++m)
            if (mus[k] * vstep[m] > 1.0) {
                st.flagged[k] = 1;
                break;
            }
        if (st.flagged[k] && policy == CoarseGridPolicy::Throw)
            throw GridTooCoarse("solve_scalar: step stability heuristic tripped for mu = " +
                                std::to_string(mus[k]));
    }

    const int nt = resolve_threads(n_threads);
    const int n_chunks = std::max(1, std::min(M, nt));
    std::vector<std::vector<int>> chunks(n_chunks);
    for (int k = 0; k < M; ++k) chunks[k % n_chunks].push_back(k);
    parallel_for(n_chunks, nt, [&](int c) { sweep_chunk(kernel, grid, st, chunks[c], vstep); });

    auto shared_grid = std::make_shared<TimeGrid>(grid);
    std::vector<ScalarResolventTable> out(M);
    for (int k = 0; k < M; ++k) {
        out[k].mu = mus[k];
        out[k].grid = shared_grid;
        out[k].s = std::move(st.s[k]);
        out[k].sdot = std::move(st.sdot[k]);
        out[k].sddot = std::move(st.sddot[k]);
        out[k].grid_too_coarse = st.flagged[k] != 0;
        out[k].hybrid_fallback = st.hybrid[k] != 0;
    }
    return out;
}

ScalarResolventTable solve_scalar(const KernelSpec& kernel, double mu, const TimeGrid& grid,
                                  CoarseGridPolicy policy) {
    return std::move(solve_scalar_batch(kernel, {mu}, grid, policy, 1).front());
}

double independent_residual(const KernelSpec& kernel, const ScalarResolventTable& table, int n_probe) {
    const auto& t = table.grid->nodes;
    const int N = static_cast<int>(t.size()) - 1;
    double worst = 0.0;
    for (int i = 1; i <= n_probe; ++i) {
        const int j = std::max(1, (N * i) / n_probe);
        const double tj = t[j];
        // int_0^{tj} B(tj - sigma) s(sigma) dsigma, evaluated interval by
        // interval (the interpolant is smooth inside each one); only B
        // evaluations enter, independent of the moment formulas
        double conv = 0.0;
        for (int m = 0; m < j; ++m) {
            conv += quad::integrate(
                [&](double sig) { return kernel.primitive(tj - sig) * table.eval_s(sig); }, t[m], t[m + 1],
                {1e-11, 1e-16, 200});
        }
        worst = std::max(worst, std::abs(table.s[j] - 1.0 + table.mu * conv));
    }
    return worst;
}

namespace {

double trapz(const std::vector<double>& t, const std::vector<double>& y, int from = 0) {
    double acc = 0.0;
    for (size_t m = from; m + 1 < t.size(); ++m) acc += 0.5 * (y[m] + y[m + 1]) * (t[m + 1] - t[m]);
    return acc;
}

double table_tail_estimate(const std::vector<double>& t, const std::vector<double>& y) {
    // local decay power over the last quarter of the time range
    const double T = t.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t m = 0; m < t.size(); ++m) {
        if (t[m] < T / 4.0 || y[m] == 0.0) continue;
        const double lx = std::log(t[m]), ly = std::log(std::abs(y[m]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 4) return 0.0;
    const double p = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(p > 1.05)) return 0.0;
    return std::abs(y.back()) * T / (p - 1.0);
}

double fit_slope(const std::vector<double>& mus, const std::vector<double>& vals) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(mus.size());
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(mus[i]), ly = std::log(vals[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

ScalarNormReport verify_scalar_estimates(const KernelSpec& kernel, const std::vector<double>& mus,
                                         const std::vector<TimeGrid>& grids, double rho,
                                         bool tail_corrections, int n_threads) {
    if (mus.size() != grids.size() || mus.empty())
        throw ParameterOutOfRange("verify_scalar_estimates: need one grid per mu");
    ScalarNormReport rep;
    rep.rows.resize(mus.size());
    rep.target_decaying = -1.0 / rho;

    parallel_for(static_cast<int>(mus.size()), n_threads, [&](int i) {
        const auto table = solve_scalar(kernel, mus[i], grids[i]);
        const auto& t = table.grid->nodes;
        const int N = static_cast<int>(t.size()) - 1;
        ScalarNormRow row;
        row.mu = mus[i];
        std::vector<double> abs_s(N + 1), abs_sd(N + 1), t_sd(N + 1), t_sdd(N + 1), t2_sdd(N + 1);
        for (int j = 0; j <= N; ++j) {
            abs_s[j] = std::abs(table.s[j]);
            abs_sd[j] = std::abs(table.sdot[j]);
            t_sd[j] = t[j] * abs_sd[j];
            const double sdd = (j == 0) ? 0.0 : std::abs(table.sddot[j]);
            t_sdd[j] = t[j] * sdd;
            t2_sdd[j] = t[j] * t[j] * sdd;
            row.sup_abs_s = std::max(row.sup_abs_s, abs_s[j]);
        }
        row.l1_s = trapz(t, abs_s);
        row.l1_sdot = trapz(t, abs_sd);
        row.l1_tsdot = trapz(t, t_sd);
        // the sddot integrands start at the first interior node; the head
        // [0, t_1] uses sddot ~ -mu b there
        row.l1_tsddot = trapz(t, t_sdd, 1) + mus[i] * kernel.moment1(t[1]);
        row.l1_t2sddot = trapz(t, t2_sdd, 1) + mus[i] * kernel.moment2(t[1]);
        if (tail_corrections) {
            row.tail_s = table_tail_estimate(t, table.s);
            row.tail_tsdot = table_tail_estimate(t, t_sd);
            row.tail_t2sddot = table_tail_estimate(t, t2_sdd);
            row.l1_s += row.tail_s;
            row.l1_tsdot += row.tail_tsdot;
            row.l1_t2sddot += row.tail_t2sddot;
        }
        rep.rows[i] = row;
    });

    // horizon check on the largest mu
    size_t imax = 0;
    for (size_t i = 1; i < mus.size(); ++i)
        if (mus[i] > mus[imax]) imax = i;
    {
        const auto table = solve_scalar(kernel, mus[imax], grids[imax]);
        if (std::abs(table.s.back()) >= 0.01)
            throw HorizonTooShort("verify_scalar_estimates: |s(T)| >= 0.01 at the largest mu");
    }

    std::vector<double> v1, v2, v3, v4, v5;
    for (const auto& r : rep.rows) {
        v1.push_back(r.l1_s);
        v2.push_back(r.l1_sdot);
        v3.push_back(r.l1_tsdot);
        v4.push_back(r.l1_tsddot);
        v5.push_back(r.l1_t2sddot);
        rep.max_abs_s = std::max(rep.max_abs_s, r.sup_abs_s);
    }
    std::vector<double> mv(mus.begin(), mus.end());
    rep.slope_s = fit_slope(mv, v1);
    rep.slope_sdot = fit_slope(mv, v2);
    rep.slope_tsdot = fit_slope(mv, v3);
    rep.slope_tsddot = fit_slope(mv, v4);
    rep.slope_t2sddot = fit_slope(mv, v5);
    return rep;
}

} // namespace stovol
