#ifndef STOVOL_SCALAR_RESOLVENT_HPP
#define STOVOL_SCALAR_RESOLVENT_HPP

#include "stovol/kernel.hpp"

#include <memory>
#include <vector>

namespace stovol {

struct TimeGrid {
    enum class Kind { Uniform, Graded };
    double horizon = 0;
    Kind kind = Kind::Uniform;
    double grading = 1.0;
    std::vector<double> nodes; // nodes[0] = 0, nodes[N] = horizon, strictly increasing

    static TimeGrid uniform(double T, int n_steps);
    /// nodes t_j = T (j/N)^g, g >= 1
    static TimeGrid graded(double T, int n_steps, double g);

    int n_steps() const { return static_cast<int>(nodes.size()) - 1; }
    double dt(int j) const { return nodes[j + 1] - nodes[j]; } // step j: [t_j, t_{j+1}]
    bool same_nodes(const TimeGrid& o) const;
};

/// Scalar resolvent table: s_mu, its derivative recovered from the equation
/// itself (sdot = -mu (b*s)), and the second derivative
/// sddot = -mu [b + b * s'] with s' the interpolant's derivative.
/// sddot[0] is undefined for rho < 2 and stored as 0.
struct ScalarResolventTable {
    double mu = 0;
    std::shared_ptr<const TimeGrid> grid;
    std::vector<double> s, sdot, sddot;
    bool grid_too_coarse = false; // step-overload heuristic tripped somewhere
    bool hybrid_fallback = false; // solve restarted with downgraded steps

    double eval_s(double t) const;    // piecewise linear in t
    double eval_sdot(double t) const; // piecewise linear in t
};

enum class CoarseGridPolicy { Flag, Throw };

/// Implicit product-integration solve of sdot + mu (b*s) = 0, s(0) = 1.
///
/// Each step integrates the equation exactly against the piecewise-linear
/// interpolant (equivalently, collocates s + mu (B*s) = 1), so the only
/// error source is the interpolation of s; the t^(rho-2) kernel singularity
/// is handled exactly through the kernel moments. The per-step equation is
/// linear in the new value. If |s| escapes past 1.02 (the continuous
/// solution obeys |s| <= 1 for kernels of positive type) the solve restarts
/// with overloaded steps (mu B(dt) dt > 1) downgraded to piecewise-constant
/// collocation, which damps unconditionally.
ScalarResolventTable solve_scalar(const KernelSpec& kernel, double mu, const TimeGrid& grid,
                                  CoarseGridPolicy policy = CoarseGridPolicy::Flag);

/// Batched solve sharing one grid (and hence one set of kernel moments)
/// across all mu; parallel over chunks of modes.
std::vector<ScalarResolventTable> solve_scalar_batch(const KernelSpec& kernel, const std::vector<double>& mus,
                                                     const TimeGrid& grid,
                                                     CoarseGridPolicy policy = CoarseGridPolicy::Flag,
                                                     int n_threads = 0);

/// Residual of the collocated equation recomputed with adaptive quadrature
/// of B(t_j - sigma) s(sigma) (independent of the moment formulas); returns
/// max_j |s_j - 1 + mu * quad|.
double independent_residual(const KernelSpec& kernel, const ScalarResolventTable& table, int n_probe = 12);

struct ScalarNormRow {
    double mu = 0;
    double l1_s = 0, l1_sdot = 0, l1_tsdot = 0, l1_tsddot = 0, l1_t2sddot = 0;
    double tail_s = 0, tail_tsdot = 0, tail_t2sddot = 0; // algebraic tail estimates
    double sup_abs_s = 0;
};

struct ScalarNormReport {
    std::vector<ScalarNormRow> rows;
    // fitted log-log mu-slopes and their Lemma-predicted targets
    double slope_s = 0, slope_sdot = 0, slope_tsdot = 0, slope_tsddot = 0, slope_t2sddot = 0;
    double target_decaying = 0; // -1/rho
    double max_abs_s = 0;
};

/// Computes the four norm groups of the scalar estimates on the tables and
/// fits their mu-scaling. One grid per mu (same size vectors). Throws
/// HorizonTooShort when |s(T)| >= 0.01 for the largest mu.
ScalarNormReport verify_scalar_estimates(const KernelSpec& kernel, const std::vector<double>& mus,
                                         const std::vector<TimeGrid>& grids, double rho,
                                         bool tail_corrections = true, int n_threads = 0);

} // namespace stovol

#endif
