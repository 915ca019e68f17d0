#ifndef STOVOL_NOISE_HPP
#define STOVOL_NOISE_HPP

#include "stovol/spectral.hpp"

#include <cstdint>
#include <vector>

namespace stovol {

/// Diagonal covariances in the eigenbasis of A. White noise is realized
/// through the Cameron-Martin identification (the embedding J = A^{-g/2}
/// changes the carrier space, not the integrands), so q_k = 1 on the
/// truncated basis.
struct CovarianceSpec {
    enum class Kind { White, PowerDiagonal, CustomDiagonal };
    Kind kind = Kind::White;
    double gamma = 0;
    std::vector<double> custom_q;

    static CovarianceSpec white();
    static CovarianceSpec power_diagonal(double gamma);
    static CovarianceSpec custom_diagonal(std::vector<double> q);

    double q(const SpectralBasis& basis, int k) const; // 1-based
    /// Trace finiteness over the full (untruncated) basis, from the
    /// lambda_k ~ (k pi)^2 asymptotic.
    bool trace_class() const;
};

/// Counter-based Gaussian: a pure function of (seed, path, mode, step).
double gaussian_draw(std::uint64_t seed, std::uint64_t path_index, std::uint64_t mode, std::uint64_t step);

/// Per-(mode, step) increments with variance q_k * dt_j.
struct NoisePath {
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    std::shared_ptr<const TimeGrid> grid;
    int n_modes = 0;
    std::vector<double> increments; // row-major: step * n_modes + (mode-1)

    double dW(int step, int mode) const { return increments[static_cast<size_t>(step) * n_modes + mode - 1]; }
};

NoisePath sample_increments(const CovarianceSpec& cov, const SpectralBasis& basis, const TimeGrid& grid,
                            std::uint64_t seed, std::uint64_t path_index, int n_modes);

/// Weighted Hilbert-Schmidt norm of a diagonal operator against the
/// Cameron-Martin basis: (sum_k q_k lambda_k^{r_w} d_k^2)^{1/2} over the
/// truncated basis.
double hs_norm(const std::vector<double>& op_diag, double r_w, const CovarianceSpec& cov,
               const SpectralBasis& basis);

/// Partial sums of the same series over k = 1..n for convergence displays.
std::vector<double> hs_norm_partial_sums(const std::vector<double>& op_diag, double r_w,
                                         const CovarianceSpec& cov, const SpectralBasis& basis);

/// Whether the untruncated series converges, from the k^(2 r_w) asymptotic
/// (custom covariances fall back to a Cauchy test on the partial sums).
bool hs_series_converges(double r_w, const CovarianceSpec& cov, const SpectralBasis& basis);

struct ConvolutionOptions {
    bool midpoint_shift = false; // evaluate s at lag t_j - t_i - dt/2 (off: left Ito rule)
};

/// Discrete stochastic convolution (W_S)_k(t_j) = sum_{i<j} s_k(t_j - t_i)
/// G_k dW_{k,i}; returns the full path as node-major matrix
/// values[j * n_modes + (k-1)]. Uses FFT convolution per mode on uniform
/// grids, direct sums otherwise.
std::vector<double> stochastic_convolution(const ResolventBank& bank, const CovarianceSpec& cov,
                                           const TimeGrid& grid, std::uint64_t seed, std::uint64_t path_index,
                                           const std::vector<double>& g_diag,
                                           const ConvolutionOptions& opt = {});

/// Same sum evaluated only at the requested nodes (cheap when few nodes are
/// needed); result is node-major over `nodes`.
std::vector<double> stochastic_convolution_at(const ResolventBank& bank, const CovarianceSpec& cov,
                                              std::uint64_t seed, std::uint64_t path_index,
                                              const std::vector<double>& g_diag, const std::vector<int>& nodes);

/// E ||W_S(t_node)||^2 for the left-point rule, computed exactly:
/// sum_k q_k G_k^2 sum_{i<j} s_k(t_j - t_i)^2 dt_i.
double discrete_ito_second_moment(const ResolventBank& bank, const CovarianceSpec& cov,
                                  const std::vector<double>& g_diag, int node);

} // namespace stovol

#endif
