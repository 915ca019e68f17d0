#ifndef STOVOL_CERTIFY_HPP
#define STOVOL_CERTIFY_HPP

#include "stovol/kernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stovol {

/// Sampling of the right-half-plane boundary lam = eps + ik (log-spaced k)
/// plus interior rays arg lam = theta * pi/2.
struct ContourSpec {
    double eps = 1e-8;
    double k_min = 1e-6;
    double k_max = 1e8;
    int n_samples = 600;
    int refine_iters = 80;
    std::vector<double> ray_fractions = {0.5, 0.8, 0.95, 0.99};
};

struct SectorResult {
    double angle = 0;      // sampled sup |arg bhat|
    double rho_sector = 0; // 1 + (2/pi) angle
    double k_at_max = 0;
    double interior_max = 0; // largest |arg| seen on the rays (diagnostic)
};

SectorResult sector_angle(const KernelSpec& k, const ContourSpec& contour = {});

/// sup over the contour of |lam|^j |bhat^(j)| / |bhat| for j = 0..order.
std::vector<double> check_k_regularity(const KernelSpec& k, int order = 2, const ContourSpec& contour = {});

struct GrowthOptions {
    double mu_min = 1e6;
    double mu_max = 1e12;
    int n_mu = 13;
    double slope_tol = 2e-3;   // product passes iff fitted log-log slope <= this
    double ratio_bound = 50.0; // and max/min over the grid <= this
    double eps = 1e-8;         // boundary offset for g(k)
    double quad_rel_tol = 1e-9;
};

struct GrowthCandidate {
    double rho = 0;
    double tail_slope = 0;
    double max_min_ratio = 0;
    bool pass = false;
};

struct GrowthReport {
    std::vector<double> mu;
    std::vector<double> integral1, integral2; // left sides of the two conditions
    std::vector<double> product1;             // mu * I1
    bool product1_bounded = false;
    double i2_tail_slope = 0;   // d log I2 / d log mu over the top decades
    double rho_growth_fit = 0;  // -1 / (slope + 1)
    std::vector<GrowthCandidate> candidates;
    double rho_growth = 0;      // smallest passing candidate; NaN if none
};

GrowthReport check_growth_conditions(const KernelSpec& k, const std::vector<double>& rho_candidates,
                                     const GrowthOptions& opt = {});

/// Largest m <= order with (-1)^n b^(n) >= 0 on the grid for all n <= m,
/// by divided differences; 0 if even positivity fails.
int check_monotonicity(const KernelSpec& k, int order = 4, const std::vector<double>& grid = {});

struct BSmoothResult {
    std::vector<double> t;
    std::vector<double> ratio; // (1/t) int_0^t s b / int_0^t -s b'
    bool bounded = false;
    double max_ratio = 0;
};

/// Quotient of Remark 2.2's regularity condition on a log-spaced grid;
/// the denominator uses the identity int_0^t -s b'(s) ds = B(t) - t b(t).
BSmoothResult check_b_smooth(const KernelSpec& k, double t_min = 1e-6, double t_max = 1e6, int n = 49);

struct L1ScalingResult {
    std::vector<double> t, norm;
    double slope = 0; // fitted log-log slope over the small-t range
};

L1ScalingResult l1_norm_scaling(const KernelSpec& k, double t_min = 1e-4, double t_max = 1e-1, int n = 13);

/// Smallest p in {1,2,4,8} for which int |g/(|k|+|g|)|^p dk has
/// Cauchy-stable partial sums; 0 if none of them does.
int smallest_lp_membership(const KernelSpec& k, const ContourSpec& contour = {});

/// Local integrability of b: int_0^eps |b| by singularity-split quadrature.
double local_l1_mass(const KernelSpec& k, double eps = 1e-2);

struct AssumptionCondition {
    std::string name;
    double value = 0;
    double threshold = 0;
    bool pass = false;
};

struct AssumptionReport {
    double sector_angle = 0;
    double rho_sector = 0;
    double rho_growth = 0;
    std::vector<double> regularity_constants;   // per order j
    GrowthReport growth;
    int monotone_order = 0;
    std::vector<double> b_smooth_ratio;
    int lp_membership = 0;
    std::vector<AssumptionCondition> conditions;
    bool all_pass = false;
};

struct CertifyOptions {
    ContourSpec contour{};
    GrowthOptions growth{};
    std::vector<double> rho_candidates; // default: 1.05..1.95 step 0.01
    bool check_time_domain = true;      // monotonicity / b-smooth / L1 need b(t)
};

AssumptionReport certify_kernel(const KernelSpec& k, const CertifyOptions& opt = {});

} // namespace stovol

#endif
