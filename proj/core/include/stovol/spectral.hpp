#ifndef STOVOL_SPECTRAL_HPP
#define STOVOL_SPECTRAL_HPP

#include "stovol/scalar_resolvent.hpp"

#include <string>
#include <vector>

namespace stovol {

/// Dirichlet Laplacian eigenbasis on (0,1): lambda_k = (k pi)^2,
/// e_k = sqrt(2) sin(k pi x), k = 1..n_modes.
struct SpectralBasis {
    int n_modes = 0;
    std::vector<double> lambdas;

    explicit SpectralBasis(int n);
    double lambda(int k) const { return lambdas[k - 1]; } // 1-based mode index
};

/// Coordinates of an H-valued element against e_k; coeffs[i] is mode i+1.
struct SpectralField {
    std::vector<double> coeffs;

    SpectralField() = default;
    explicit SpectralField(int n) : coeffs(n, 0.0) {}
    static SpectralField unit_mode(int n, int k);
    int size() const { return static_cast<int>(coeffs.size()); }
};

SpectralField frac_power_apply(double s, const SpectralBasis& basis, const SpectralField& f);
double hdot_norm(double beta, const SpectralBasis& basis, const SpectralField& f);

/// Per-mode scalar resolvent tables for mu = lambda_k on one shared grid.
struct ResolventBank {
    SpectralBasis basis;
    KernelSpec kernel;
    std::shared_ptr<const TimeGrid> grid;
    std::vector<ScalarResolventTable> tables; // tables[k-1] has mu = lambda_k
    std::vector<int> coarse_modes;            // 1-based indices that tripped the heuristic

    const ScalarResolventTable& table(int k) const { return tables[k - 1]; }
    double s_at(int k, int node) const { return tables[k - 1].s[node]; }
    double sdot_at(int k, int node) const { return tables[k - 1].sdot[node]; }
    int n_nodes() const { return static_cast<int>(grid->nodes.size()); }
};

ResolventBank build_resolvent_bank(const KernelSpec& kernel, const SpectralBasis& basis, const TimeGrid& grid,
                                   CoarseGridPolicy policy = CoarseGridPolicy::Flag, int n_threads = 0);

/// S(t_node) f and its derivative; diagonal action of the tables.
SpectralField apply_S(const ResolventBank& bank, int node, const SpectralField& f);
SpectralField apply_Sdot(const ResolventBank& bank, int node, const SpectralField& f);

/// mode-wise trapezoidal int_0^{t_node} s_k; diagonal action on f
SpectralField integrated_resolvent(const ResolventBank& bank, const SpectralField& f, int node);

/// max_k lambda_k^{1/rho} |int_0^t s_k| over all nodes and modes (Lemma-4.5
/// style boundedness diagnostic).
double integrated_resolvent_bound(const ResolventBank& bank, double rho);

struct SmoothingFit {
    std::string norm_name; // "A^s S", "A^s Sdot", "A^-s Sdot"
    double s_exponent = 0;
    double slope = 0;
    double target = 0;
    double window_lo = 0, window_hi = 0;
    int n_points = 0;
    int argmax_min = 0, argmax_max = 0; // 1-based mode range over fit points
};

struct SmoothingOptions {
    double window_lo = 0;  // 0: use 5 * T / n_steps
    double window_hi = 0;  // 0: use T / 10
    double window_hi_negative_power = 0; // 0: use T / 50 (for A^{-s} Sdot)
    int n_fit_points = 40;
    double truncation_fraction = 0.5; // throw if more points than this are argmax-pinned at N
};

/// Log-log slope fits of the operator-norm decay for the diagonal family:
/// ||A^s S(t)|| = max_k lambda_k^s |s_k(t)| (exact truncated operator norm)
/// against the predicted exponents -s rho (S) and -s rho - 1 (Sdot),
/// s in [0, 1/rho]. Fit points with edge-pinned argmax are dropped.
std::vector<SmoothingFit> measure_smoothing(const ResolventBank& bank, double s_exponent, double rho,
                                            const SmoothingOptions& opt = {});

/// ||A^{-s} Sdot(t)|| fit against the improved-smoothing exponent
/// rho s - 1, s in [0, 1]; fitted on a smaller-t window (mode 1 leaves its
/// early power regime quickly).
SmoothingFit measure_smoothing_negative(const ResolventBank& bank, double s_exponent, double rho,
                                        const SmoothingOptions& opt = {});

} // namespace stovol

#endif
