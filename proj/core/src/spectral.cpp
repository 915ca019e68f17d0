#include "stovol/spectral.hpp"

#include "stovol/errors.hpp"

#include <algorithm>
#include <cmath>

namespace stovol {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SpectralBasis::SpectralBasis(int n) : n_modes(n) {
    if (n < 1) throw ParameterOutOfRange("SpectralBasis: need at least one mode");
    lambdas.resize(n);
    for (int k = 1; k <= n; ++k) lambdas[k - 1] = (k * kPi) * (k * kPi);
}

SpectralField SpectralField::unit_mode(int n, int k) {
    SpectralField f(n);
    if (k < 1 || k > n) throw ParameterOutOfRange("unit_mode: mode index out of range");
    f.coeffs[k - 1] = 1.0;
    return f;
}

SpectralField frac_power_apply(double s, const SpectralBasis& basis, const SpectralField& f) {
    if (f.size() != basis.n_modes) throw GridMismatch("frac_power_apply: field/basis size mismatch");
    SpectralField out = f;
    for (int i = 0; i < f.size(); ++i) out.coeffs[i] *= std::pow(basis.lambdas[i], s);
    return out;
}

double hdot_norm(double beta, const SpectralBasis& basis, const SpectralField& f) {
    if (f.size() != basis.n_modes) throw GridMismatch("hdot_norm: field/basis size mismatch");
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i)
        acc += std::pow(basis.lambdas[i], beta) * f.coeffs[i] * f.coeffs[i];
    return std::sqrt(acc);
}

ResolventBank build_resolvent_bank(const KernelSpec& kernel, const SpectralBasis& basis, const TimeGrid& grid,
                                   CoarseGridPolicy policy, int n_threads) {
    ResolventBank bank{basis, kernel, nullptr, {}, {}};
    try {
        bank.tables = solve_scalar_batch(kernel, basis.lambdas, grid, policy, n_threads);
    } catch (const GridTooCoarse& e) {
        throw GridTooCoarse(std::string(e.what()) + " (while building the resolvent bank)");
    }
    bank.grid = bank.tables.front().grid;
    for (int k = 1; k <= basis.n_modes; ++k)
        if (bank.tables[k - 1].grid_too_coarse) bank.coarse_modes.push_back(k);
    return bank;
}

namespace {

SpectralField apply_diag(const ResolventBank& bank, int node, const SpectralField& f, bool derivative) {
    if (f.size() != bank.basis.n_modes) throw GridMismatch("apply_S: field/basis size mismatch");
    if (node < 0 || node >= bank.n_nodes()) throw GridMismatch("apply_S: node index out of range");
    SpectralField out = f;
    for (int k = 1; k <= bank.basis.n_modes; ++k)
        out.coeffs[k - 1] *= derivative ? bank.sdot_at(k, node) : bank.s_at(k, node);
    return out;
}

} // namespace

SpectralField apply_S(const ResolventBank& bank, int node, const SpectralField& f) {
    return apply_diag(bank, node, f, false);
}

SpectralField apply_Sdot(const ResolventBank& bank, int node, const SpectralField& f) {
    return apply_diag(bank, node, f, true);
}

SpectralField integrated_resolvent(const ResolventBank& bank, const SpectralField& f, int node) {
    if (f.size() != bank.basis.n_modes) throw GridMismatch("integrated_resolvent: size mismatch");
    if (node < 0 || node >= bank.n_nodes()) throw GridMismatch("integrated_resolvent: node out of range");
    SpectralField out(f.size());
    const auto& t = bank.grid->nodes;
    for (int k = 1; k <= bank.basis.n_modes; ++k) {
        const auto& s = bank.table(k).s;
        double acc = 0.0;
        for (int m = 0; m < node; ++m) acc += 0.5 * (s[m] + s[m + 1]) * (t[m + 1] - t[m]);
        out.coeffs[k - 1] = acc * f.coeffs[k - 1];
    }
    return out;
}

double integrated_resolvent_bound(const ResolventBank& bank, double rho) {
    const auto& t = bank.grid->nodes;
    double worst = 0.0;
    for (int k = 1; k <= bank.basis.n_modes; ++k) {
        const auto& s = bank.table(k).s;
        const double w = std::pow(bank.basis.lambda(k), 1.0 / rho);
        double acc = 0.0;
        for (size_t m = 0; m + 1 < t.size(); ++m) {
            acc += 0.5 * (s[m] + s[m + 1]) * (t[m + 1] - t[m]);
            worst = std::max(worst, w * std::abs(acc));
        }
    }
    return worst;
}

namespace {

struct FitAccumulator {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    void add(double x, double y) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double slope() const { return (n * sxy - sx * sy) / (n * sxx - sx * sx); }
};

SmoothingFit fit_norm_curve(const ResolventBank& bank, const std::string& name, double s_exp, double target,
                            double lo, double hi, int n_fit, double trunc_frac) {
    const auto& t = bank.grid->nodes;
    const int N = bank.basis.n_modes;
    const bool derivative = name != "A^s S";
    SmoothingFit fit;
    fit.norm_name = name;
    fit.s_exponent = s_exp;
    fit.target = target;
    fit.window_lo = lo;
    fit.window_hi = hi;
    fit.argmax_min = N + 1;
    fit.argmax_max = 0;

    std::vector<double> weights(N);
    for (int k = 1; k <= N; ++k) weights[k - 1] = std::pow(bank.basis.lambda(k), s_exp);

    FitAccumulator acc;
    int pinned_at_N = 0, used_targets = 0;
    double prev_t = -1.0;
    for (int i = 0; i < n_fit; ++i) {
        const double target_t = lo * std::pow(hi / lo, static_cast<double>(i) / (n_fit - 1));
        // snap to the nearest node
        const auto it = std::lower_bound(t.begin(), t.end(), target_t);
        int j = static_cast<int>(it - t.begin());
        j = std::clamp(j, 1, static_cast<int>(t.size()) - 1);
        if (t[j] == prev_t) continue;
        prev_t = t[j];
        ++used_targets;
        double best = 0.0;
        int argmax = 1;
        for (int k = 1; k <= N; ++k) {
            const double v = weights[k - 1] * std::abs(derivative ? bank.sdot_at(k, j) : bank.s_at(k, j));
            if (v > best) {
                best = v;
                argmax = k;
            }
        }
        if (argmax == N) {
            ++pinned_at_N;
            continue; // truncation-dominated point
        }
        if (argmax == 1 && s_exp > 0.0) continue; // left the scale-invariant regime
        if (best <= 0.0) continue;
        fit.argmax_min = std::min(fit.argmax_min, argmax);
        fit.argmax_max = std::max(fit.argmax_max, argmax);
        acc.add(std::log(t[j]), std::log(best));
    }
    if (used_targets > 0 && pinned_at_N > trunc_frac * used_targets)
        throw SpectralTruncationDominates("measure_smoothing: argmax pinned at the top mode for most of the window");
    if (acc.n < 5) throw SpectralTruncationDominates("measure_smoothing: fewer than 5 usable fit points");
    fit.slope = acc.slope();
    fit.n_points = acc.n;
    return fit;
}

} // namespace

std::vector<SmoothingFit> measure_smoothing(const ResolventBank& bank, double s_exp, double rho,
                                            const SmoothingOptions& opt) {
    const double T = bank.grid->horizon;
    const int n_steps = static_cast<int>(bank.grid->nodes.size()) - 1;
    const double lo = opt.window_lo > 0 ? opt.window_lo : 5.0 * T / n_steps;
    const double hi = opt.window_hi > 0 ? opt.window_hi : T / 10.0;

    std::vector<SmoothingFit> fits;
    fits.push_back(fit_norm_curve(bank, "A^s S", s_exp, -s_exp * rho, lo, hi, opt.n_fit_points,
                                  opt.truncation_fraction));
    fits.push_back(fit_norm_curve(bank, "A^s Sdot", s_exp, -s_exp * rho - 1.0, lo, hi, opt.n_fit_points,
                                  opt.truncation_fraction));
    return fits;
}

SmoothingFit measure_smoothing_negative(const ResolventBank& bank, double s_exp, double rho,
                                        const SmoothingOptions& opt) {
    const double T = bank.grid->horizon;
    const int n_steps = static_cast<int>(bank.grid->nodes.size()) - 1;
    const double lo = opt.window_lo > 0 ? opt.window_lo : 5.0 * T / n_steps;
    const double hi = opt.window_hi_negative_power > 0 ? opt.window_hi_negative_power : T / 50.0;
    return fit_norm_curve(bank, "A^-s Sdot", -s_exp, rho * s_exp - 1.0, lo, std::max(hi, lo * 2.0),
                          opt.n_fit_points, opt.truncation_fraction);
}

} // namespace stovol
