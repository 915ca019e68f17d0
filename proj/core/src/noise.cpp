#include "stovol/noise.hpp"

#include "stovol/errors.hpp"
#include "stovol/fft.hpp"
#include "stovol/special_functions.hpp"

#include <cmath>

namespace stovol {

CovarianceSpec CovarianceSpec::white() {
    CovarianceSpec c;
    c.kind = Kind::White;
    return c;
}

CovarianceSpec CovarianceSpec::power_diagonal(double gamma) {
    if (gamma < 0.0) throw ParameterOutOfRange("power_diagonal: gamma must be >= 0");
    CovarianceSpec c;
    c.kind = Kind::PowerDiagonal;
    c.gamma = gamma;
    return c;
}

CovarianceSpec CovarianceSpec::custom_diagonal(std::vector<double> q) {
    for (double v : q)
        if (v < 0.0) throw ParameterOutOfRange("custom_diagonal: q_k must be >= 0");
    CovarianceSpec c;
    c.kind = Kind::CustomDiagonal;
    c.custom_q = std::move(q);
    return c;
}

double CovarianceSpec::q(const SpectralBasis& basis, int k) const {
    switch (kind) {
        case Kind::White: return 1.0;
        case Kind::PowerDiagonal: return std::pow(basis.lambda(k), -gamma);
        case Kind::CustomDiagonal:
            if (k < 1 || k > static_cast<int>(custom_q.size()))
                throw ParameterOutOfRange("covariance: q_k requested beyond the supplied table");
            return custom_q[k - 1];
    }
    return 0.0;
}

bool CovarianceSpec::trace_class() const {
    switch (kind) {
        case Kind::White: return false;        // sum 1 diverges
        case Kind::PowerDiagonal: return gamma > 0.5; // sum k^{-2 gamma}
        case Kind::CustomDiagonal: return true; // finitely many entries
    }
    return false;
}

namespace {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

double gaussian_draw(std::uint64_t seed, std::uint64_t path_index, std::uint64_t mode, std::uint64_t step) {
    std::uint64_t x = splitmix(seed ^ 0xA0761D6478BD642Full);
    x = splitmix(x ^ (path_index + 1) * 0xE7037ED1A0B428DBull);
    x = splitmix(x ^ (mode + 1) * 0x8EBC6AF09C88C6E3ull);
    x = splitmix(x ^ (step + 1) * 0x589965CC75374CC3ull);
    // (0,1) uniform from the top 53 bits, endpoint-free
    const double u = (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    return sf::inverse_normal_cdf(u);
}

NoisePath sample_increments(const CovarianceSpec& cov, const SpectralBasis& basis, const TimeGrid& grid,
                            std::uint64_t seed, std::uint64_t path_index, int n_modes) {
    if (n_modes < 1 || n_modes > basis.n_modes)
        throw ParameterOutOfRange("sample_increments: n_modes must be within the basis size");
    NoisePath p;
    p.seed = seed;
    p.path_index = path_index;
    p.grid = std::make_shared<TimeGrid>(grid);
    p.n_modes = n_modes;
    const int n_steps = grid.n_steps();
    p.increments.resize(static_cast<size_t>(n_steps) * n_modes);
    for (int i = 0; i < n_steps; ++i) {
        const double dt = grid.dt(i);
        for (int k = 1; k <= n_modes; ++k) {
            const double sd = std::sqrt(cov.q(basis, k) * dt);
            p.increments[static_cast<size_t>(i) * n_modes + k - 1] =
                sd == 0.0 ? 0.0 : sd * gaussian_draw(seed, path_index, k, i);
        }
    }
    return p;
}

double hs_norm(const std::vector<double>& op_diag, double r_w, const CovarianceSpec& cov,
               const SpectralBasis& basis) {
    if (static_cast<int>(op_diag.size()) != basis.n_modes)
        throw GridMismatch("hs_norm: diagonal length must match the basis");
    double acc = 0.0;
    for (int k = 1; k <= basis.n_modes; ++k)
        acc += cov.q(basis, k) * std::pow(basis.lambda(k), r_w) * op_diag[k - 1] * op_diag[k - 1];
    return std::sqrt(acc);
}

std::vector<double> hs_norm_partial_sums(const std::vector<double>& op_diag, double r_w,
                                         const CovarianceSpec& cov, const SpectralBasis& basis) {
    std::vector<double> out(basis.n_modes);
    double acc = 0.0;
    for (int k = 1; k <= basis.n_modes; ++k) {
        acc += cov.q(basis, k) * std::pow(basis.lambda(k), r_w) * op_diag[k - 1] * op_diag[k - 1];
        out[k - 1] = acc;
    }
    return out;
}

bool hs_series_converges(double r_w, const CovarianceSpec& cov, const SpectralBasis& basis) {
    switch (cov.kind) {
        case CovarianceSpec::Kind::White: return 2.0 * r_w < -1.0;
        case CovarianceSpec::Kind::PowerDiagonal: return 2.0 * (r_w - cov.gamma) < -1.0;
        case CovarianceSpec::Kind::CustomDiagonal: {
            std::vector<double> ones(basis.n_modes, 1.0);
            const auto ps = hs_norm_partial_sums(ones, r_w, cov, basis);
            const double half = ps[basis.n_modes / 2 - 1];
            return ps.back() - half <= 0.05 * std::max(ps.back(), 1e-300);
        }
    }
    return false;
}

namespace {

// lag values of s_k used by the convolution; midpoint shift interpolates
// the table at t_j - t_i - dt/2
std::vector<double> lag_values(const ScalarResolventTable& table, int n_steps, bool midpoint, double dt) {
    std::vector<double> lag(n_steps + 1, 0.0);
    for (int l = 1; l <= n_steps; ++l)
        lag[l] = midpoint ? table.eval_s(std::max(0.0, l * dt - 0.5 * dt)) : table.s[l];
    return lag;
}

} // namespace

std::vector<double> stochastic_convolution(const ResolventBank& bank, const CovarianceSpec& cov,
                                           const TimeGrid& grid, std::uint64_t seed, std::uint64_t path_index,
                                           const std::vector<double>& g_diag, const ConvolutionOptions& opt) {
    if (!bank.grid->same_nodes(grid)) throw GridMismatch("stochastic_convolution: bank grid != noise grid");
    const int n_modes = bank.basis.n_modes;
    if (static_cast<int>(g_diag.size()) != n_modes)
        throw GridMismatch("stochastic_convolution: g_diag length must match the basis");
    const int n_steps = grid.n_steps();
    std::vector<double> out(static_cast<size_t>(n_steps + 1) * n_modes, 0.0);

    const bool uniform = grid.kind == TimeGrid::Kind::Uniform;
    const double dt = grid.horizon / n_steps;

    std::vector<double> incr(n_steps);
    for (int k = 1; k <= n_modes; ++k) {
        if (g_diag[k - 1] == 0.0) continue;
        const double qsd = std::sqrt(cov.q(bank.basis, k));
        if (qsd == 0.0) continue;
        for (int i = 0; i < n_steps; ++i)
            incr[i] = qsd * std::sqrt(grid.dt(i)) * gaussian_draw(seed, path_index, k, i) * g_diag[k - 1];
        if (uniform) {
            // c[j] = sum_{i<j} lag[j-i] incr[i]: linear convolution of the
            // lag table (index >= 1) against the increments
            const auto lag = lag_values(bank.table(k), n_steps, opt.midpoint_shift, dt);
            const auto conv = fft::convolve(lag, incr, n_steps + 1);
            for (int j = 1; j <= n_steps; ++j) out[static_cast<size_t>(j) * n_modes + k - 1] = conv[j];
        } else {
            const auto& t = grid.nodes;
            const auto& table = bank.table(k);
            for (int j = 1; j <= n_steps; ++j) {
                double acc = 0.0;
                for (int i = 0; i < j; ++i) acc += table.eval_s(t[j] - t[i]) * incr[i];
                out[static_cast<size_t>(j) * n_modes + k - 1] = acc;
            }
        }
    }
    return out;
}

std::vector<double> stochastic_convolution_at(const ResolventBank& bank, const CovarianceSpec& cov,
                                              std::uint64_t seed, std::uint64_t path_index,
                                              const std::vector<double>& g_diag,
                                              const std::vector<int>& nodes) {
    const int n_modes = bank.basis.n_modes;
    if (static_cast<int>(g_diag.size()) != n_modes)
        throw GridMismatch("stochastic_convolution_at: g_diag length must match the basis");
    const auto& grid = *bank.grid;
    const int n_steps = grid.n_steps();
    std::vector<double> out(nodes.size() * n_modes, 0.0);
    std::vector<double> incr(n_steps);
    for (int k = 1; k <= n_modes; ++k) {
        if (g_diag[k - 1] == 0.0) continue;
        const double qsd = std::sqrt(cov.q(bank.basis, k));
        if (qsd == 0.0) continue;
        int needed = 0;
        for (int node : nodes) needed = std::max(needed, node);
        for (int i = 0; i < needed; ++i)
            incr[i] = qsd * std::sqrt(grid.dt(i)) * gaussian_draw(seed, path_index, k, i) * g_diag[k - 1];
        const auto& s = bank.table(k).s;
        for (size_t ni = 0; ni < nodes.size(); ++ni) {
            const int j = nodes[ni];
            if (j < 0 || j > n_steps) throw GridMismatch("stochastic_convolution_at: node out of range");
            double acc = 0.0;
            for (int i = 0; i < j; ++i) acc += s[j - i] * incr[i];
            out[ni * n_modes + k - 1] = acc;
        }
    }
    return out;
}

double discrete_ito_second_moment(const ResolventBank& bank, const CovarianceSpec& cov,
                                  const std::vector<double>& g_diag, int node) {
    const auto& grid = *bank.grid;
    double acc = 0.0;
    for (int k = 1; k <= bank.basis.n_modes; ++k) {
        const double qk = cov.q(bank.basis, k);
        const double gk = g_diag[k - 1];
        if (qk == 0.0 || gk == 0.0) continue;
        const auto& s = bank.table(k).s;
        double inner = 0.0;
        for (int i = 0; i < node; ++i) {
            const double v = s[node - i];
            inner += v * v * grid.dt(i);
        }
        acc += qk * gk * gk * inner;
    }
    return acc;
}

} // namespace stovol
