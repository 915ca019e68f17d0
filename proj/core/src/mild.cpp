#include "stovol/mild.hpp"

#include "stovol/errors.hpp"
#include "stovol/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stovol {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double scalar_apply(ScalarTag tag, double x) {
    switch (tag) {
        case ScalarTag::Sin: return std::sin(x);
        case ScalarTag::Atan: return std::atan(x);
    }
    return 0.0;
}

SineTransform::SineTransform(int n_modes, int n_points) : n_(n_modes), m_(n_points) {
    if (n_points < 2 * n_modes + 1)
        throw TransformSizeMismatch("SineTransform: need at least 2N+1 collocation points");
    table_.resize(static_cast<size_t>(n_) * m_);
    for (int k = 1; k <= n_; ++k)
        for (int m = 1; m <= m_; ++m)
            table_[static_cast<size_t>(k - 1) * m_ + m - 1] = std::sin(k * kPi * m / (m_ + 1.0));
}

void SineTransform::to_physical(const std::vector<double>& coeffs, std::vector<double>& values) const {
    if (static_cast<int>(coeffs.size()) != n_) throw TransformSizeMismatch("to_physical: coefficient size");
    values.assign(m_, 0.0);
    const double c = std::sqrt(2.0);
    for (int k = 1; k <= n_; ++k) {
        const double a = c * coeffs[k - 1];
        if (a == 0.0) continue;
        const double* row = &table_[static_cast<size_t>(k - 1) * m_];
        for (int m = 0; m < m_; ++m) values[m] += a * row[m];
    }
}

void SineTransform::to_coefficients(const std::vector<double>& values, std::vector<double>& coeffs) const {
    if (static_cast<int>(values.size()) != m_) throw TransformSizeMismatch("to_coefficients: value size");
    coeffs.assign(n_, 0.0);
    const double scale = std::sqrt(2.0) / (m_ + 1.0);
    for (int k = 1; k <= n_; ++k) {
        const double* row = &table_[static_cast<size_t>(k - 1) * m_];
        double acc = 0.0;
        for (int m = 0; m < m_; ++m) acc += row[m] * values[m];
        coeffs[k - 1] = scale * acc;
    }
}

FMap FMap::zero() { return {}; }
FMap FMap::diagonal_linear(std::vector<double> c) {
    FMap f;
    f.kind = Kind::DiagonalLinear;
    f.diag = std::move(c);
    return f;
}
FMap FMap::nemytskii(ScalarTag tag, double lipschitz) {
    FMap f;
    f.kind = Kind::Nemytskii;
    f.tag = tag;
    f.lipschitz = lipschitz;
    return f;
}

GMap GMap::zero_noise() {
    GMap g;
    g.kind = Kind::ZeroNoise;
    return g;
}
GMap GMap::additive_identity() {
    GMap g;
    g.kind = Kind::AdditiveIdentity;
    return g;
}
GMap GMap::diagonal_multiplicative(std::vector<double> d) {
    GMap g;
    g.kind = Kind::DiagonalMultiplicative;
    g.diag = std::move(d);
    return g;
}
GMap GMap::nemytskii_multiplicative(ScalarTag tag, double lipschitz) {
    GMap g;
    g.kind = Kind::NemytskiiMultiplicative;
    g.tag = tag;
    g.lipschitz = lipschitz;
    return g;
}

SpectralField apply_F(const FMap& f, const SpectralBasis& basis, const SpectralField& u,
                      const SineTransform& tr) {
    switch (f.kind) {
        case FMap::Kind::Zero: return SpectralField(basis.n_modes);
        case FMap::Kind::DiagonalLinear: {
            if (static_cast<int>(f.diag.size()) != basis.n_modes)
                throw TransformSizeMismatch("apply_F: diagonal length mismatch");
            SpectralField out = u;
            for (int i = 0; i < basis.n_modes; ++i) out.coeffs[i] *= f.diag[i];
            return out;
        }
        case FMap::Kind::Nemytskii: {
            std::vector<double> vals;
            tr.to_physical(u.coeffs, vals);
            for (double& v : vals) v = f.lipschitz * scalar_apply(f.tag, v);
            SpectralField out(basis.n_modes);
            tr.to_coefficients(vals, out.coeffs);
            return out;
        }
    }
    return SpectralField(basis.n_modes);
}

SpectralField apply_G_increment(const GMap& g, const SpectralBasis& basis, const SpectralField& u,
                                const std::vector<double>& dw, const SineTransform& tr) {
    if (static_cast<int>(dw.size()) != basis.n_modes)
        throw TransformSizeMismatch("apply_G_increment: increment length mismatch");
    SpectralField out(basis.n_modes);
    switch (g.kind) {
        case GMap::Kind::ZeroNoise: return out;
        case GMap::Kind::AdditiveIdentity:
            out.coeffs = dw;
            return out;
        case GMap::Kind::DiagonalMultiplicative: {
            if (static_cast<int>(g.diag.size()) != basis.n_modes)
                throw TransformSizeMismatch("apply_G_increment: diagonal length mismatch");
            for (int i = 0; i < basis.n_modes; ++i) out.coeffs[i] = g.diag[i] * u.coeffs[i] * dw[i];
            return out;
        }
        case GMap::Kind::NemytskiiMultiplicative: {
            std::vector<double> uvals, wvals;
            tr.to_physical(u.coeffs, uvals);
            tr.to_physical(dw, wvals);
            for (int m = 0; m < tr.n_points(); ++m)
                uvals[m] = g.lipschitz * scalar_apply(g.tag, uvals[m]) * wvals[m];
            tr.to_coefficients(uvals, out.coeffs);
            return out;
        }
    }
    return out;
}

U0Spec U0Spec::deterministic(SpectralField f) {
    U0Spec u;
    u.field = std::move(f);
    return u;
}

namespace {

// sentinel step index for the u0 randomization draw
constexpr std::uint64_t kU0Step = 0xFFFFFFFFFFFFull;

std::vector<double> initial_field(const ProblemSpec& ps, std::uint64_t seed, std::uint64_t path) {
    std::vector<double> u0 = ps.u0.field.coeffs;
    u0.resize(ps.basis.n_modes, 0.0);
    if (ps.u0.random_scaled) {
        const double xi = gaussian_draw(seed, path, 0, kU0Step);
        for (double& c : u0) c *= xi;
    }
    return u0;
}

} // namespace

PicardResult picard_solve(const ProblemSpec& ps, const ResolventBank& bank, std::uint64_t seed,
                          std::uint64_t path_index, const PicardOptions& opt,
                          std::optional<std::vector<double>> initial_iterate) {
    const int nm = ps.basis.n_modes;
    const auto& grid = *bank.grid;
    const int N = grid.n_steps();
    const auto& t = grid.nodes;
    const bool needs_transform =
        ps.f_map.kind == FMap::Kind::Nemytskii || ps.g_map.kind == GMap::Kind::NemytskiiMultiplicative;
    SineTransform tr(nm, needs_transform ? 2 * nm + 1 : 2 * nm + 1);

    const NoisePath noise = (ps.g_map.kind == GMap::Kind::ZeroNoise)
                                ? NoisePath{}
                                : sample_increments(ps.cov, ps.basis, grid, seed, path_index, nm);

    const std::vector<double> u0 = initial_field(ps, seed, path_index);
    // S(t_j) u0 precomputed per node
    std::vector<double> su0(static_cast<size_t>(N + 1) * nm);
    for (int j = 0; j <= N; ++j)
        for (int k = 1; k <= nm; ++k) su0[static_cast<size_t>(j) * nm + k - 1] = bank.s_at(k, j) * u0[k - 1];

    std::vector<double> u(static_cast<size_t>(N + 1) * nm, 0.0);
    if (initial_iterate) {
        if (initial_iterate->size() != u.size())
            throw TransformSizeMismatch("picard_solve: initial iterate size mismatch");
        u = *initial_iterate;
    }

    // Lipschitz budget for the default alpha
    const double cf = (ps.f_map.kind == FMap::Kind::Zero) ? 0.0 : std::max(ps.f_map.lipschitz, 1.0);
    const double cg = ps.g_map.additive() ? 0.0 : std::max(ps.g_map.lipschitz, 1.0);
    const double alpha0 =
        opt.alpha0 > 0 ? opt.alpha0 : std::max(1.0, 4.0 * (cf + cg) * (cf + cg) * std::max(1.0, ps.horizon));

    const double s0 = ps.s0();
    std::vector<double> wnorm(nm);
    for (int k = 1; k <= nm; ++k) wnorm[k - 1] = std::pow(ps.basis.lambda(k), s0);

    std::vector<double> fnode(nm), gnode(nm), dwv(nm, 0.0);
    std::vector<double> z(static_cast<size_t>(N) * nm); // F dt + G dW source per step
    std::vector<double> next(u.size());
    std::vector<std::vector<double>> diff_profiles; // per iteration: sup-norm profile over nodes
    bool sup_converged = false;
    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        // sources from the current iterate (predictable: node i feeds steps > i)
        for (int i = 0; i < N; ++i) {
            SpectralField ui(nm);
            std::copy_n(&u[static_cast<size_t>(i) * nm], nm, ui.coeffs.begin());
            const SpectralField fv = apply_F(ps.f_map, ps.basis, ui, tr);
            if (ps.g_map.kind != GMap::Kind::ZeroNoise)
                for (int k = 1; k <= nm; ++k) dwv[k - 1] = noise.dW(i, k);
            const SpectralField gv = apply_G_increment(ps.g_map, ps.basis, ui, dwv, tr);
            const double dti = grid.dt(i);
            for (int k = 0; k < nm; ++k)
                z[static_cast<size_t>(i) * nm + k] = fv.coeffs[k] * dti + gv.coeffs[k];
        }
        // new iterate: S u0 + sum_{i<j} S(t_j - t_i) z_i  (node lags)
        std::copy(su0.begin(), su0.end(), next.begin());
        for (int k = 1; k <= nm; ++k) {
            const auto& s = bank.table(k).s;
            for (int j = 1; j <= N; ++j) {
                double acc = 0.0;
                if (grid.kind == TimeGrid::Kind::Uniform) {
                    for (int i = 0; i < j; ++i) acc += s[j - i] * z[static_cast<size_t>(i) * nm + k - 1];
                } else {
                    const auto& table = bank.table(k);
                    for (int i = 0; i < j; ++i)
                        acc += table.eval_s(t[j] - t[i]) * z[static_cast<size_t>(i) * nm + k - 1];
                }
                next[static_cast<size_t>(j) * nm + k - 1] += acc;
            }
        }
        // difference profile in the Hdot^{s0} norm
        std::vector<double> prof(N + 1, 0.0);
        double sup = 0.0;
        for (int j = 0; j <= N; ++j) {
            double acc = 0.0;
            for (int k = 0; k < nm; ++k) {
                const double d = next[static_cast<size_t>(j) * nm + k] - u[static_cast<size_t>(j) * nm + k];
                acc += wnorm[k] * d * d;
            }
            prof[j] = std::sqrt(acc);
            sup = std::max(sup, prof[j]);
        }
        diff_profiles.push_back(std::move(prof));
        std::swap(u, next);
        if (sup < opt.tol) { // implies d_n < tol for every alpha >= 0
            sup_converged = true;
            ++iter;
            break;
        }
    }

    // certificate: scan the alpha ladder on the recorded profiles
    PicardCertificate cert;
    cert.iterations = iter;
    cert.converged = sup_converged;
    double alpha = alpha0;
    for (int d = 0; d <= opt.max_alpha_doublings; ++d, alpha *= 2.0) {
        std::vector<double> dist;
        for (const auto& prof : diff_profiles) {
            double m = 0.0;
            for (int j = 0; j <= N; ++j) m = std::max(m, std::exp(-alpha * t[j]) * prof[j]);
            dist.push_back(m);
        }
        double ratio = 0.0;
        for (size_t n = 1; n + 1 < dist.size(); ++n)
            if (dist[n] > 0.0) ratio = std::max(ratio, dist[n + 1] / dist[n]);
        if (dist.size() >= 2 && dist[0] > 0.0) ratio = std::max(ratio, dist[1] / dist[0]);
        if (ratio <= opt.ratio_bound || d == opt.max_alpha_doublings) {
            cert.alpha = alpha;
            cert.distances = dist;
            cert.geometric_ratio = ratio;
            if (ratio > opt.ratio_bound)
                throw NoContraction("picard_solve: measured ratio " + std::to_string(ratio) +
                                    " exceeds the bound even at alpha = " + std::to_string(alpha) +
                                    "; increase alpha further or refine the grid");
            break;
        }
    }
    if (!sup_converged)
        throw NoContraction("picard_solve: no convergence to tol within max_iter (alpha = " +
                            std::to_string(cert.alpha) + ")");

    PicardResult res;
    res.path = std::move(u);
    res.certificate = cert;
    return res;
}

namespace {

double hdot_sq(const double* coeffs, const std::vector<double>& w, int nm) {
    double acc = 0.0;
    for (int k = 0; k < nm; ++k) acc += w[k] * coeffs[k] * coeffs[k];
    return acc;
}

} // namespace

EnsembleStats run_ensemble(const ProblemSpec& ps, const ResolventBank& bank, std::uint64_t seed, int n_paths,
                           const MeasurementPlan& plan, const PicardOptions& opt, int n_threads) {
    const int nm = ps.basis.n_modes;
    const auto& grid = *bank.grid;
    const int N = grid.n_steps();
    const int ns = static_cast<int>(plan.s_exponents.size());
    const int nl = static_cast<int>(plan.lag_steps.size());
    const int nb = static_cast<int>(plan.base_nodes.size());

    // fast path: u = S u0 + W_S when the problem is affine in the noise and
    // F vanishes (one Picard application is exact)
    const bool affine = ps.f_map.kind == FMap::Kind::Zero && ps.g_map.additive();
    const bool need_full_path = plan.want_sup || !plan.beta_grid.empty();

    // required nodes when only increments/norms are measured
    std::vector<int> nodes;
    for (int b : plan.base_nodes) {
        nodes.push_back(b);
        for (int l : plan.lag_steps) {
            if (b + l > N) throw LagOutOfRange("run_ensemble: base + lag beyond the horizon");
            nodes.push_back(b + l);
        }
    }
    for (int j : plan.norm_nodes) nodes.push_back(j);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    std::vector<double> weights_flat(static_cast<size_t>(ns) * nm);
    for (int si = 0; si < ns; ++si)
        for (int k = 1; k <= nm; ++k)
            weights_flat[static_cast<size_t>(si) * nm + k - 1] = std::pow(ps.basis.lambda(k), plan.s_exponents[si]);

    // per-path measurement slots (deterministic reduction afterwards)
    const int n_incr = ns * nl;
    std::vector<double> incr_slots(static_cast<size_t>(n_paths) * std::max(1, n_incr), 0.0);
    std::vector<double> sup_slots(plan.want_sup ? static_cast<size_t>(n_paths) * ns : 0, 0.0);
    const int nbeta = static_cast<int>(plan.beta_grid.size());
    std::vector<double> holder_slots(static_cast<size_t>(n_paths) * ns * std::max(1, nbeta), 0.0);
    const int nnodes_norm = static_cast<int>(plan.norm_nodes.size());
    std::vector<double> norm_slots(static_cast<size_t>(n_paths) * ns * std::max(1, nnodes_norm), 0.0);
    std::vector<char> failed(n_paths, 0);

    std::vector<double> g_ones(nm, 1.0);

    parallel_for(n_paths, n_threads, [&](int pi) {
        const std::uint64_t path = static_cast<std::uint64_t>(pi);
        std::vector<double> at_values;     // node-major over `nodes`
        std::vector<double> full;          // node-major full path
        const std::vector<double>* values = nullptr;
        std::vector<int> value_nodes;
        try {
            if (affine && !need_full_path) {
                at_values = (ps.g_map.kind == GMap::Kind::ZeroNoise)
                                ? std::vector<double>(nodes.size() * nm, 0.0)
                                : stochastic_convolution_at(bank, ps.cov, seed, path, g_ones, nodes);
                const std::vector<double> u0 = initial_field(ps, seed, path);
                for (size_t ni = 0; ni < nodes.size(); ++ni)
                    for (int k = 1; k <= nm; ++k)
                        at_values[ni * nm + k - 1] += bank.s_at(k, nodes[ni]) * u0[k - 1];
                values = &at_values;
                value_nodes = nodes;
            } else if (affine) {
                full = (ps.g_map.kind == GMap::Kind::ZeroNoise)
                           ? std::vector<double>(static_cast<size_t>(N + 1) * nm, 0.0)
                           : stochastic_convolution(bank, ps.cov, grid, seed, path, g_ones);
                const std::vector<double> u0 = initial_field(ps, seed, path);
                for (int j = 0; j <= N; ++j)
                    for (int k = 1; k <= nm; ++k)
                        full[static_cast<size_t>(j) * nm + k - 1] += bank.s_at(k, j) * u0[k - 1];
                values = &full;
                value_nodes.resize(N + 1);
                for (int j = 0; j <= N; ++j) value_nodes[j] = j;
            } else {
                PicardResult pr = picard_solve(ps, bank, seed, path, opt);
                full = std::move(pr.path);
                values = &full;
                value_nodes.resize(N + 1);
                for (int j = 0; j <= N; ++j) value_nodes[j] = j;
            }
        } catch (const std::exception&) {
            failed[pi] = 1;
            return;
        }

        auto node_offset = [&](int node) -> size_t {
            const auto it = std::lower_bound(value_nodes.begin(), value_nodes.end(), node);
            return static_cast<size_t>(it - value_nodes.begin()) * nm;
        };

        for (int si = 0; si < ns; ++si) {
            const std::vector<double> w(weights_flat.begin() + static_cast<size_t>(si) * nm,
                                        weights_flat.begin() + static_cast<size_t>(si + 1) * nm);
            for (int li = 0; li < nl; ++li) {
                double acc = 0.0;
                for (int bi = 0; bi < nb; ++bi) {
                    const int b = plan.base_nodes[bi];
                    const int l = plan.lag_steps[li];
                    const double* ub = values->data() + node_offset(b);
                    const double* uh = values->data() + node_offset(b + l);
                    double d2 = 0.0;
                    for (int k = 0; k < nm; ++k) {
                        const double d = uh[k] - ub[k];
                        d2 += w[k] * d * d;
                    }
                    acc += std::pow(d2, plan.p_moment / 2.0);
                }
                incr_slots[static_cast<size_t>(pi) * n_incr + si * nl + li] = acc / nb;
            }
            if (plan.want_sup) {
                double sup = 0.0;
                for (int j = 0; j <= N; ++j)
                    sup = std::max(sup, hdot_sq(values->data() + static_cast<size_t>(j) * nm, w, nm));
                sup_slots[static_cast<size_t>(pi) * ns + si] = sup;
            }
            for (int biN = 0; biN < nnodes_norm; ++biN) {
                const double* uj = values->data() + node_offset(plan.norm_nodes[biN]);
                norm_slots[(static_cast<size_t>(pi) * ns + si) * std::max(1, nnodes_norm) + biN] =
                    hdot_sq(uj, w, nm);
            }
            for (int bi = 0; bi < nbeta; ++bi) {
                // max over (base, lag) pairs of ||u(t+h)-u(t)|| / h^beta
                double q = 0.0;
                for (int bn = 0; bn < nb; ++bn)
                    for (int li = 0; li < nl; ++li) {
                        const int b = plan.base_nodes[bn], l = plan.lag_steps[li];
                        const double h = grid.nodes[b + l] - grid.nodes[b];
                        const double* ub = values->data() + node_offset(b);
                        const double* uh = values->data() + node_offset(b + l);
                        double d2 = 0.0;
                        for (int k = 0; k < nm; ++k) {
                            const double d = uh[k] - ub[k];
                            d2 += w[k] * d * d;
                        }
                        q = std::max(q, std::sqrt(d2) / std::pow(h, plan.beta_grid[bi]));
                    }
                holder_slots[(static_cast<size_t>(pi) * ns + si) * std::max(1, nbeta) + bi] = q;
            }
        }
    });

    // sequential reduction in path order (bit-stable across thread counts)
    EnsembleStats st;
    st.n_paths = n_paths;
    st.s_exponents = plan.s_exponents;
    st.lag_steps = plan.lag_steps;
    st.beta_grid = plan.beta_grid;
    st.norm_nodes = plan.norm_nodes;
    st.incr_moment.assign(ns, std::vector<double>(nl, 0.0));
    st.incr_moment_se.assign(ns, std::vector<double>(nl, 0.0));
    if (plan.want_sup) st.sup_samples.assign(ns, {});
    st.holder_quotients.assign(ns, std::vector<std::vector<double>>(nbeta));
    st.node_norms.assign(ns, std::vector<double>(nnodes_norm, 0.0));

    int n_ok = 0;
    for (int pi = 0; pi < n_paths; ++pi) {
        if (failed[pi]) {
            ++st.picard_failures;
            st.failed_paths.push_back(pi);
            continue;
        }
        ++n_ok;
        for (int si = 0; si < ns; ++si) {
            for (int li = 0; li < nl; ++li) {
                const double v = incr_slots[static_cast<size_t>(pi) * n_incr + si * nl + li];
                st.incr_moment[si][li] += v;
                st.incr_moment_se[si][li] += v * v;
            }
            if (plan.want_sup) st.sup_samples[si].push_back(sup_slots[static_cast<size_t>(pi) * ns + si]);
            for (int biN = 0; biN < nnodes_norm; ++biN)
                st.node_norms[si][biN] +=
                    norm_slots[(static_cast<size_t>(pi) * ns + si) * std::max(1, nnodes_norm) + biN];
            for (int bi = 0; bi < nbeta; ++bi)
                st.holder_quotients[si][bi].push_back(
                    holder_slots[(static_cast<size_t>(pi) * ns + si) * std::max(1, nbeta) + bi]);
        }
    }
    if (n_ok == 0) throw EnsembleTooSmall("run_ensemble: every path failed");
    for (int si = 0; si < ns; ++si) {
        for (int li = 0; li < nl; ++li) {
            const double mean = st.incr_moment[si][li] / n_ok;
            const double var = std::max(0.0, st.incr_moment_se[si][li] / n_ok - mean * mean);
            st.incr_moment[si][li] = mean;
            st.incr_moment_se[si][li] = std::sqrt(var / n_ok);
        }
        for (int biN = 0; biN < nnodes_norm; ++biN) st.node_norms[si][biN] /= n_ok;
    }
    return st;
}

} // namespace stovol
