#ifndef STOVOL_REGULARITY_HPP
#define STOVOL_REGULARITY_HPP

#include "stovol/mild.hpp"

#include <string>
#include <vector>

namespace stovol {

struct HolderFit {
    double s_exponent = 0;
    double slope = 0;
    double ci_halfwidth = 0; // 2x OLS standard error
    double predicted = 0;    // min(1/2, kappa/2 + 1)
    double kappa = 0;
    std::vector<double> lags, values; // D(h) per lag
    bool pass = false;                // |slope - predicted| within tolerance
    double tolerance = 0;
};

double kappa_of(double r, double s, double rho);
double predicted_holder_exponent(double kappa);

/// Mean-p increment slope fit from ensemble statistics:
/// D(h) = (E ||u(t+h)-u(t)||^p)^{1/p} averaged over the base points.
HolderFit estimate_holder(const EnsembleStats& stats, const TimeGrid& grid, int s_index, double r, double rho,
                          double tolerance, int p_moment);

struct MaxBoundResult {
    double value = 0;          // empirical E sup_t ||.||^p
    double refined_value = 0;  // same under the refined configuration
    double rel_change = 0;
    bool stable = false;       // |change| < 10%
};

/// Maximal-bound stability: compares E sup_t ||u(t)||^2 between a base and
/// a refined ensemble (the caller doubles N or N_t; counter-based draws
/// make the first N modes common between the two runs).
MaxBoundResult max_bound_stability(const std::vector<double>& base_sups,
                                   const std::vector<double>& refined_sups, double threshold = 0.10);

struct KappaIntegralResult {
    double kappa = 0, t = 0, h = 0;
    double i1_closed = 0, i1_quadrature = 0;
    double i2_semi = 0, i2_quadrature = 0; // inner antiderivative + outer quadrature vs fully nested
    double i1_h_slope = 0, i2_h_slope = 0; // fitted over dyadic h at fixed t
};

/// Lemma-4.6 style double integrals. I1 has a full closed form; I2 closes
/// the inner integral and quadratures the outer one. Slopes are fitted over
/// h in {h0 2^-m}.
KappaIntegralResult kappa_integrals(double kappa, double t, double h, int n_slope_lags = 6);

struct PathwiseHolderResult {
    double beta = 0;
    double median = 0;
    double q95 = 0;
};

/// Distribution summary of the per-path Holder quotients collected by
/// run_ensemble.
std::vector<PathwiseHolderResult> pathwise_holder(const EnsembleStats& stats, int s_index);

struct RegularityReport {
    struct Entry {
        double s = 0;
        double kappa = 0;
        double predicted = 0;
        double slope = 0;
        double ci = 0;
        bool pass = false;
        std::vector<double> lags, values;
    };
    std::vector<Entry> entries;
    double r = 0, rho = 0;
    int n_paths = 0;
    int p_moment = 2;
};

RegularityReport build_regularity_report(const EnsembleStats& stats, const TimeGrid& grid, double r, double rho,
                                         double tolerance, int p_moment);

} // namespace stovol

#endif
