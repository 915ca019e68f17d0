#include "stovol/regularity.hpp"

#include "stovol/errors.hpp"
#include "stovol/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace stovol {

double kappa_of(double r, double s, double rho) { return (r - s - 1.0) * rho; }

double predicted_holder_exponent(double kappa) { return std::min(0.5, kappa / 2.0 + 1.0); }

namespace {

struct OLS {
    double slope = 0, se = 0;
};

OLS ols_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    OLS out;
    const double den = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / den;
    const double b0 = (sy - out.slope * sx) / n;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double resid = std::log(y[i]) - (b0 + out.slope * std::log(x[i]));
        ss += resid * resid;
    }
    if (n > 2) out.se = std::sqrt(ss / (n - 2) / (sxx - sx * sx / n));
    return out;
}

} // namespace

HolderFit estimate_holder(const EnsembleStats& stats, const TimeGrid& grid, int s_index, double r, double rho,
                          double tolerance, int p_moment) {
    if (s_index < 0 || s_index >= static_cast<int>(stats.s_exponents.size()))
        throw ParameterOutOfRange("estimate_holder: s index out of range");
    if (stats.lag_steps.size() < 5) throw LagOutOfRange("estimate_holder: need at least 5 lags");
    HolderFit fit;
    fit.s_exponent = stats.s_exponents[s_index];
    fit.kappa = kappa_of(r, fit.s_exponent, rho);
    fit.predicted = predicted_holder_exponent(fit.kappa);
    fit.tolerance = tolerance;
    const int N = grid.n_steps();
    for (size_t li = 0; li < stats.lag_steps.size(); ++li) {
        const int l = stats.lag_steps[li];
        if (l < 4 || l > N / 4) throw LagOutOfRange("estimate_holder: lag outside (4 dt, T/4)");
        fit.lags.push_back(grid.horizon * l / N);
        fit.values.push_back(std::pow(stats.incr_moment[s_index][li], 1.0 / p_moment));
    }
    const OLS o = ols_loglog(fit.lags, fit.values);
    fit.slope = o.slope;
    fit.ci_halfwidth = 2.0 * o.se;
    if (fit.ci_halfwidth > 0.1)
        throw EnsembleTooSmall("estimate_holder: confidence halfwidth exceeds 0.1");
    fit.pass = std::abs(fit.slope - fit.predicted) <= tolerance;
    return fit;
}

MaxBoundResult max_bound_stability(const std::vector<double>& base_sups,
                                   const std::vector<double>& refined_sups, double threshold) {
    if (base_sups.empty() || refined_sups.empty())
        throw EnsembleTooSmall("max_bound_stability: empty sup samples");
    MaxBoundResult out;
    for (double v : base_sups) out.value += v;
    out.value /= base_sups.size();
    for (double v : refined_sups) out.refined_value += v;
    out.refined_value /= refined_sups.size();
    out.rel_change = (out.refined_value - out.value) / out.value;
    out.stable = std::abs(out.rel_change) < threshold;
    return out;
}

namespace {

// inner antiderivative of the first integral:
// int_0^t (eta - sigma)^{kappa/2 - 1} dsigma = (2/|kappa|) [(eta-t)^{kappa/2} - eta^{kappa/2}]
double i1_inner(double kappa, double t, double eta) {
    return (2.0 / -kappa) * (std::pow(eta - t, kappa / 2.0) - std::pow(eta, kappa / 2.0));
}

double i1_closed_form(double kappa, double t, double h) {
    const double e = kappa / 2.0 + 1.0;
    return (2.0 / -kappa) * (std::pow(h, e) - (std::pow(t + h, e) - std::pow(t, e))) / e;
}

double i2_inner(double kappa, double t, double eta) {
    return (1.0 / -kappa) * (std::pow(eta - t, kappa) - std::pow(eta, kappa));
}

double i2_semi_closed(double kappa, double t, double h) {
    // outer integrand ~ (eta - t)^{kappa/2} at eta = t: endpoint singular
    return quad::integrate_endpoint_singular(
        [kappa, t](double eta) { return std::sqrt(std::max(0.0, i2_inner(kappa, t, eta))); }, t, t + h,
        {1e-12, 0.0, 6000});
}

} // namespace

KappaIntegralResult kappa_integrals(double kappa, double t, double h, int n_slope_lags) {
    if (!(kappa > -2.0 && kappa < 0.0)) throw ParameterOutOfRange("kappa_integrals: kappa must be in (-2,0)");
    if (!(t > 0.0 && h > 0.0)) throw ParameterOutOfRange("kappa_integrals: t, h must be positive");
    KappaIntegralResult out;
    out.kappa = kappa;
    out.t = t;
    out.h = h;
    out.i1_closed = i1_closed_form(kappa, t, h);
    out.i1_quadrature = quad::integrate_endpoint_singular(
        [kappa, t](double eta) { return i1_inner(kappa, t, eta); }, t, t + h, {1e-12, 0.0, 6000});
    out.i2_semi = i2_semi_closed(kappa, t, h);
    // fully nested oracle for I2: inner by singular-endpoint quadrature too
    out.i2_quadrature = quad::integrate_endpoint_singular(
        [kappa, t](double eta) {
            const double inner = quad::integrate_endpoint_singular(
                [kappa, eta](double sigma) { return std::pow(eta - sigma, kappa - 1.0); }, 0.0, t,
                {1e-11, 0.0, 4000});
            return std::sqrt(std::max(0.0, inner));
        },
        t, t + h, {1e-9, 0.0, 2000});

    std::vector<double> hs, v1, v2;
    for (int m = 0; m < n_slope_lags; ++m) {
        const double hm = h * std::pow(2.0, -m);
        hs.push_back(hm);
        v1.push_back(i1_closed_form(kappa, t, hm));
        v2.push_back(i2_semi_closed(kappa, t, hm));
    }
    out.i1_h_slope = ols_loglog(hs, v1).slope;
    out.i2_h_slope = ols_loglog(hs, v2).slope;
    return out;
}

std::vector<PathwiseHolderResult> pathwise_holder(const EnsembleStats& stats, int s_index) {
    if (s_index < 0 || s_index >= static_cast<int>(stats.holder_quotients.size()))
        throw ParameterOutOfRange("pathwise_holder: s index out of range");
    std::vector<PathwiseHolderResult> out;
    for (size_t bi = 0; bi < stats.beta_grid.size(); ++bi) {
        std::vector<double> q = stats.holder_quotients[s_index][bi];
        if (q.size() < 20) throw EnsembleTooSmall("pathwise_holder: need at least 20 paths");
        std::sort(q.begin(), q.end());
        PathwiseHolderResult r;
        r.beta = stats.beta_grid[bi];
        r.median = q[q.size() / 2];
        r.q95 = q[static_cast<size_t>(0.95 * (q.size() - 1))];
        out.push_back(r);
    }
    return out;
}

RegularityReport build_regularity_report(const EnsembleStats& stats, const TimeGrid& grid, double r, double rho,
                                         double tolerance, int p_moment) {
    RegularityReport rep;
    rep.r = r;
    rep.rho = rho;
    rep.n_paths = stats.n_paths;
    rep.p_moment = p_moment;
    for (int si = 0; si < static_cast<int>(stats.s_exponents.size()); ++si) {
        const HolderFit fit = estimate_holder(stats, grid, si, r, rho, tolerance, p_moment);
        RegularityReport::Entry e;
        e.s = fit.s_exponent;
        e.kappa = fit.kappa;
        e.predicted = fit.predicted;
        e.slope = fit.slope;
        e.ci = fit.ci_halfwidth;
        e.pass = fit.pass;
        e.lags = fit.lags;
        e.values = fit.values;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

} // namespace stovol
