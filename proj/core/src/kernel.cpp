#include "stovol/kernel.hpp"

#include "stovol/errors.hpp"
#include "stovol/quadrature.hpp"
#include "stovol/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stovol {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

struct KernelSpec::Impl {
    // TemperedRiesz
    double rho = 0, eta = 0;
    // FiniteHistory: b = sum c_i t^{e_i} on (0,1)
    std::array<double, 4> fh_e{}, fh_c{};
    // LaplaceDefined
    LaplaceFn bhat;
    std::array<LaplaceFn, 3> bhat_derivs{};
    TimeFn time_eval;
    // Tabulated: nodes + samples + prefix moments at nodes
    std::vector<double> tab_t, tab_b;
    std::vector<double> tab_B, tab_B1, tab_M1, tab_M2;
    KernelVariant variant{};

    // ---- tempered Riesz helpers -------------------------------------------
    // eta = 0: plain powers. eta > 0: lower incomplete gamma with a = rho-1.
    double tr_B(double t) const {
        if (t <= 0) return 0;
        const double a = rho - 1.0;
        if (eta == 0.0) return std::pow(t, a) / sf::gamma_lanczos(rho);
        return sf::lower_incomplete_gamma(a, eta * t) / (std::pow(eta, a) * sf::gamma_lanczos(a));
    }
    double tr_M1(double t) const {
        if (t <= 0) return 0;
        const double a = rho - 1.0;
        if (eta == 0.0) return std::pow(t, rho) / (rho * sf::gamma_lanczos(a));
        return sf::lower_incomplete_gamma(a + 1.0, eta * t) / (std::pow(eta, a + 1.0) * sf::gamma_lanczos(a));
    }
    double tr_M2(double t) const {
        if (t <= 0) return 0;
        const double a = rho - 1.0;
        if (eta == 0.0) return std::pow(t, rho + 1.0) / ((rho + 1.0) * sf::gamma_lanczos(a));
        return sf::lower_incomplete_gamma(a + 2.0, eta * t) / (std::pow(eta, a + 2.0) * sf::gamma_lanczos(a));
    }
    double tr_B1(double t) const {
        if (t <= 0) return 0;
        const double a = rho - 1.0;
        if (eta == 0.0) return std::pow(t, rho) / sf::gamma_lanczos(rho + 1.0);
        const double g = std::pow(eta, a) * sf::gamma_lanczos(a);
        return (t * sf::lower_incomplete_gamma(a, eta * t) -
                sf::lower_incomplete_gamma(a + 1.0, eta * t) / eta) / g;
    }

    // ---- finite history helpers -------------------------------------------
    double fh_eval(double t) const {
        if (t >= 1.0) return 0.0;
        const double q = fh_e[2]; // (rho-2)/3
        const double u = std::pow(t, q);
        const double v = u - 1.0;
        return v * v * v;
    }
    double fh_powsum(double t, int shift) const {
        // sum_i c_i t^{e_i + shift} / (e_i + shift), t in [0, 1]
        double acc = 0;
        for (int i = 0; i < 4; ++i) acc += fh_c[i] * std::pow(t, fh_e[i] + shift) / (fh_e[i] + shift);
        return acc;
    }
    double fh_B(double t) const { return t <= 0 ? 0.0 : fh_powsum(std::min(t, 1.0), 1); }
    double fh_M1(double t) const { return t <= 0 ? 0.0 : fh_powsum(std::min(t, 1.0), 2); }
    double fh_M2(double t) const { return t <= 0 ? 0.0 : fh_powsum(std::min(t, 1.0), 3); }
    double fh_B1(double t) const {
        if (t <= 0) return 0.0;
        const double tm = std::min(t, 1.0);
        double acc = 0;
        for (int i = 0; i < 4; ++i)
            acc += fh_c[i] * std::pow(tm, fh_e[i] + 2.0) / ((fh_e[i] + 1.0) * (fh_e[i] + 2.0));
        if (t > 1.0) acc += fh_B(1.0) * (t - 1.0);
        return acc;
    }

    // ---- tabulated helpers -------------------------------------------------
    int tab_interval(double t) const {
        // largest m with tab_t[m] <= t; t inside [front, back]
        const auto it = std::upper_bound(tab_t.begin(), tab_t.end(), t);
        int m = static_cast<int>(it - tab_t.begin()) - 1;
        return std::clamp(m, 0, static_cast<int>(tab_t.size()) - 2);
    }
    double tab_eval(double t) const {
        if (t < tab_t.front() || t > tab_t.back())
            throw OutsideTabulatedRange("tabulated kernel evaluated outside its grid");
        const int m = tab_interval(t);
        const double w = (t - tab_t[m]) / (tab_t[m + 1] - tab_t[m]);
        return tab_b[m] * (1.0 - w) + tab_b[m + 1] * w;
    }
    // moments treat b as 0 outside [t0, tN]; exact for the interpolant
    double tab_moment(double t, int which) const { // 0:B 1:M1 2:M2 3:B1
        if (t <= tab_t.front()) return 0.0;
        const double tc = std::min(t, tab_t.back());
        const int m = tab_interval(tc);
        const std::vector<double>& base = which == 0 ? tab_B : which == 1 ? tab_M1 : which == 2 ? tab_M2 : tab_B1;
        double acc = base[m];
        const double a = tab_t[m], dt = tab_t[m + 1] - a;
        const double slope = (tab_b[m + 1] - tab_b[m]) / dt;
        const double x = tc - a;
        auto seg = [&](int w) {
            // int_a^{a+x} tau^w (b[m] + slope (tau - a)) dtau expanded in x
            const double b0 = tab_b[m];
            switch (w) {
                case 0: return b0 * x + slope * x * x / 2.0;
                case 1: return b0 * (a * x + x * x / 2.0) + slope * (a * x * x / 2.0 + x * x * x / 3.0);
                default: {
                    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
                    return b0 * (a * a * x + a * x2 + x3 / 3.0) +
                           slope * (a * a * x2 / 2.0 + 2.0 * a * x3 / 3.0 + x4 / 4.0);
                }
            }
        };
        if (which == 3) {
            // B1 within the interval: B1[m] + int_a^{a+x} B(tau) dtau where
            // B(tau) = tab_B[m] + b0 (tau-a) + slope (tau-a)^2 / 2
            acc += tab_B[m] * x + tab_b[m] * x * x / 2.0 + slope * x * x * x / 6.0;
        } else {
            acc += seg(which);
        }
        if (t > tab_t.back() && which == 3) acc += tab_B.back() * (t - tab_t.back());
        return acc;
    }
};

KernelSpec KernelSpec::tempered_riesz(double rho, double eta) {
    if (!(rho > 1.0 && rho < 2.0)) throw ParameterOutOfRange("tempered_riesz: rho must be in (1,2)");
    if (eta < 0.0) throw ParameterOutOfRange("tempered_riesz: eta must be >= 0");
    KernelSpec k;
    auto impl = std::make_shared<Impl>();
    impl->variant = KernelVariant::TemperedRiesz;
    impl->rho = rho;
    impl->eta = eta;
    k.variant_ = KernelVariant::TemperedRiesz;
    k.rho_hint_ = rho;
    k.impl_ = impl;
    return k;
}

KernelSpec KernelSpec::finite_history(double rho) {
    if (!(rho > 1.0 && rho < 2.0)) throw ParameterOutOfRange("finite_history: rho must be in (1,2)");
    KernelSpec k;
    auto impl = std::make_shared<Impl>();
    impl->variant = KernelVariant::FiniteHistory;
    impl->rho = rho;
    const double q = (rho - 2.0) / 3.0;
    impl->fh_e = {3.0 * q, 2.0 * q, q, 0.0};
    impl->fh_c = {1.0, -3.0, 3.0, -1.0};
    k.variant_ = KernelVariant::FiniteHistory;
    k.rho_hint_ = rho;
    k.impl_ = impl;
    return k;
}

KernelSpec KernelSpec::laplace_defined(LaplaceFn bhat, std::array<LaplaceFn, 3> derivatives, TimeFn time_eval) {
    KernelSpec k;
    auto impl = std::make_shared<Impl>();
    impl->variant = KernelVariant::LaplaceDefined;
    impl->bhat = std::move(bhat);
    impl->bhat_derivs = std::move(derivatives);
    impl->time_eval = std::move(time_eval);
    k.variant_ = KernelVariant::LaplaceDefined;
    k.rho_hint_ = kNaN;
    k.impl_ = impl;
    return k;
}

KernelSpec KernelSpec::laplace_example() {
    auto D0 = [](complexd l) { return std::pow(l, 0.4) + 0.4 * (std::pow(l + 1.0, -5.0) - 1.0); };
    auto D1 = [](complexd l) { return 0.4 * std::pow(l, -0.6) - 2.0 * std::pow(l + 1.0, -6.0); };
    auto D2 = [](complexd l) { return -0.24 * std::pow(l, -1.6) + 12.0 * std::pow(l + 1.0, -7.0); };
    auto D3 = [](complexd l) { return 0.384 * std::pow(l, -2.6) - 84.0 * std::pow(l + 1.0, -8.0); };
    LaplaceFn f = [D0](complexd l) { return 1.0 / D0(l); };
    std::array<LaplaceFn, 3> derivs = {
        [D0, D1](complexd l) {
            const complexd d = D0(l);
            return -D1(l) / (d * d);
        },
        [D0, D1, D2](complexd l) {
            const complexd d = D0(l), d1 = D1(l);
            return (2.0 * d1 * d1 - d * D2(l)) / (d * d * d);
        },
        [D0, D1, D2, D3](complexd l) {
            const complexd d = D0(l), d1 = D1(l), d2 = D2(l);
            return (-6.0 * d1 * d1 * d1 + 6.0 * d * d1 * d2 - d * d * D3(l)) / (d * d * d * d);
        }};
    return laplace_defined(std::move(f), std::move(derivs));
}

KernelSpec KernelSpec::tabulated(std::vector<double> t, std::vector<double> values) {
    if (t.size() != values.size() || t.size() < 2)
        throw ParameterOutOfRange("tabulated: need matching grids with >= 2 nodes");
    for (size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw ParameterOutOfRange("tabulated: grid must be strictly increasing");
    if (t.front() < 0.0) throw ParameterOutOfRange("tabulated: grid must start at/after 0");
    KernelSpec k;
    auto impl = std::make_shared<Impl>();
    impl->variant = KernelVariant::Tabulated;
    impl->tab_t = std::move(t);
    impl->tab_b = std::move(values);
    const size_t n = impl->tab_t.size();
    impl->tab_B.assign(n, 0.0);
    impl->tab_B1.assign(n, 0.0);
    impl->tab_M1.assign(n, 0.0);
    impl->tab_M2.assign(n, 0.0);
    for (size_t m = 0; m + 1 < n; ++m) {
        const double a = impl->tab_t[m], dt = impl->tab_t[m + 1] - a;
        const double b0 = impl->tab_b[m], b1v = impl->tab_b[m + 1];
        const double slope = (b1v - b0) / dt;
        const double x = dt, x2 = x * x, x3 = x2 * x, x4 = x3 * x;
        impl->tab_B[m + 1] = impl->tab_B[m] + b0 * x + slope * x2 / 2.0;
        impl->tab_M1[m + 1] = impl->tab_M1[m] + b0 * (a * x + x2 / 2.0) + slope * (a * x2 / 2.0 + x3 / 3.0);
        impl->tab_M2[m + 1] = impl->tab_M2[m] + b0 * (a * a * x + a * x2 + x3 / 3.0) +
                              slope * (a * a * x2 / 2.0 + 2.0 * a * x3 / 3.0 + x4 / 4.0);
        impl->tab_B1[m + 1] = impl->tab_B1[m] + impl->tab_B[m] * x + b0 * x2 / 2.0 + slope * x3 / 6.0;
    }
    k.variant_ = KernelVariant::Tabulated;
    k.rho_hint_ = kNaN;
    k.impl_ = impl;
    return k;
}

std::string KernelSpec::name() const {
    switch (variant_) {
        case KernelVariant::TemperedRiesz: return "tempered_riesz";
        case KernelVariant::FiniteHistory: return "finite_history";
        case KernelVariant::LaplaceDefined: return "laplace_defined";
        case KernelVariant::Tabulated: return "tabulated";
    }
    return "unknown";
}

bool KernelSpec::has_time_domain() const {
    if (variant_ == KernelVariant::LaplaceDefined) return static_cast<bool>(impl_->time_eval);
    return true;
}

bool KernelSpec::nonnegative() const {
    switch (variant_) {
        case KernelVariant::TemperedRiesz:
        case KernelVariant::FiniteHistory: return true;
        case KernelVariant::Tabulated:
            return std::all_of(impl_->tab_b.begin(), impl_->tab_b.end(), [](double v) { return v >= 0.0; });
        default: return false;
    }
}

double KernelSpec::eval(double t) const {
    if (!(t > 0.0)) throw NonPositiveTime("eval_kernel: t must be positive");
    switch (variant_) {
        case KernelVariant::TemperedRiesz:
            return std::pow(t, impl_->rho - 2.0) * std::exp(-impl_->eta * t) / sf::gamma_lanczos(impl_->rho - 1.0);
        case KernelVariant::FiniteHistory: return impl_->fh_eval(t);
        case KernelVariant::Tabulated: return impl_->tab_eval(t);
        case KernelVariant::LaplaceDefined:
            if (!impl_->time_eval)
                throw DerivativeUnavailable("laplace-defined kernel has no time-domain evaluator");
            return impl_->time_eval(t);
    }
    return 0;
}

double KernelSpec::eval_derivative(double t) const {
    if (!(t > 0.0)) throw NonPositiveTime("eval_derivative: t must be positive");
    switch (variant_) {
        case KernelVariant::TemperedRiesz: {
            const double rho = impl_->rho, eta = impl_->eta;
            return (std::pow(t, rho - 3.0) * (rho - 2.0) - eta * std::pow(t, rho - 2.0)) * std::exp(-eta * t) /
                   sf::gamma_lanczos(rho - 1.0);
        }
        case KernelVariant::FiniteHistory: {
            if (t >= 1.0) return 0.0;
            const double q = impl_->fh_e[2];
            const double u = std::pow(t, q);
            const double v = u - 1.0;
            return 3.0 * v * v * q * std::pow(t, q - 1.0);
        }
        default: throw DerivativeUnavailable("time-domain derivative not available for " + name());
    }
}

double KernelSpec::primitive(double t) const {
    switch (variant_) {
        case KernelVariant::TemperedRiesz: return impl_->tr_B(t);
        case KernelVariant::FiniteHistory: return impl_->fh_B(t);
        case KernelVariant::Tabulated: return impl_->tab_moment(t, 0);
        default: throw KernelMomentFailure("moments unavailable without a time-domain form");
    }
}

double KernelSpec::primitive2(double t) const {
    switch (variant_) {
        case KernelVariant::TemperedRiesz: return impl_->tr_B1(t);
        case KernelVariant::FiniteHistory: return impl_->fh_B1(t);
        case KernelVariant::Tabulated: return impl_->tab_moment(t, 3);
        default: throw KernelMomentFailure("moments unavailable without a time-domain form");
    }
}

double KernelSpec::moment1(double t) const {
    switch (variant_) {
        case KernelVariant::TemperedRiesz: return impl_->tr_M1(t);
        case KernelVariant::FiniteHistory: return impl_->fh_M1(t);
        case KernelVariant::Tabulated: return impl_->tab_moment(t, 1);
        default: throw KernelMomentFailure("moments unavailable without a time-domain form");
    }
}

double KernelSpec::moment2(double t) const {
    switch (variant_) {
        case KernelVariant::TemperedRiesz: return impl_->tr_M2(t);
        case KernelVariant::FiniteHistory: return impl_->fh_M2(t);
        case KernelVariant::Tabulated: return impl_->tab_moment(t, 2);
        default: throw KernelMomentFailure("moments unavailable without a time-domain form");
    }
}

KernelMoments KernelSpec::moments(double t) const {
    KernelMoments m;
    if (t <= 0.0) return m;
    if (variant_ == KernelVariant::TemperedRiesz && impl_->eta == 0.0) {
        // share the single pow: B ~ t^{rho-1}, B1/M1 ~ t^rho, M2 ~ t^{rho+1}
        const double rho = impl_->rho;
        const double trho = std::pow(t, rho);
        const double ga = sf::gamma_lanczos(rho - 1.0);
        m.B = trho / t / (sf::gamma_lanczos(rho));
        m.B1 = trho / sf::gamma_lanczos(rho + 1.0);
        m.M1 = trho / (rho * ga);
        m.M2 = trho * t / ((rho + 1.0) * ga);
        return m;
    }
    if (variant_ == KernelVariant::FiniteHistory) {
        const double tm = std::min(t, 1.0);
        const double q = impl_->fh_e[2];
        const double u = std::pow(tm, q); // t^q; powers t^{3q},t^{2q} from it
        const double p3 = u * u * u, p2 = u * u, p1 = u, p0 = 1.0;
        const double pw[4] = {p3, p2, p1, p0};
        for (int i = 0; i < 4; ++i) {
            const double ci = impl_->fh_c[i], ei = impl_->fh_e[i];
            const double base = ci * pw[i]; // c_i t^{e_i}
            m.B += base * tm / (ei + 1.0);
            m.M1 += base * tm * tm / (ei + 2.0);
            m.M2 += base * tm * tm * tm / (ei + 3.0);
            m.B1 += base * tm * tm / ((ei + 1.0) * (ei + 2.0));
        }
        if (t > 1.0) m.B1 += m.B * (t - 1.0);
        return m;
    }
    m.B = primitive(t);
    m.B1 = primitive2(t);
    m.M1 = moment1(t);
    m.M2 = moment2(t);
    return m;
}

namespace {

// Transform derivatives of the finite-history kernel:
//   bhat^(j)(l) = (-1)^j sum_i c_i l^{-a_i} gamma(a_i, l),  a_i = e_i + 1 + j.
// For large |l| the individual upper-incomplete tails each ring like
// l^{-1} e^{-l} while their sum cancels to O(l^{-4}) (the coefficients
// annihilate the first three moments of e_i), so the canceled combination
// is assembled analytically:
//   sum_i c_i l^{-a_i} Gamma(a_i, l) = l^{-1} e^{-l} sum_{m>=3} C_m l^{-m},
//   C_m = sum_i c_i prod_{l=1..m} (a_i - l).
complexd fh_laplace_deriv(const std::array<double, 4>& e, const std::array<double, 4>& c, int j,
                          complexd lambda) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    if (std::abs(lambda) <= 100.0) {
        complexd acc(0.0);
        for (int i = 0; i < 4; ++i) {
            const double a = e[i] + 1.0 + j;
            acc += c[i] * std::pow(lambda, -a) * sf::lower_incomplete_gamma(a, lambda);
        }
        return sign * acc;
    }
    complexd secular(0.0);
    for (int i = 0; i < 4; ++i) {
        const double a = e[i] + 1.0 + j;
        secular += c[i] * sf::gamma_lanczos(a) * std::pow(lambda, -a);
    }
    complexd ring(0.0);
    double prod[4];
    for (int i = 0; i < 4; ++i) {
        prod[i] = 1.0;
        for (int l = 1; l <= 3; ++l) prod[i] *= e[i] + 1.0 + j - l;
    }
    complexd lm = std::pow(lambda, -3.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 3; m < 60; ++m) {
        double cm = 0.0;
        for (int i = 0; i < 4; ++i) cm += c[i] * prod[i];
        const complexd term = cm * lm;
        if (std::abs(term) > prev && m > 5) break;
        ring += term;
        prev = std::max(std::abs(term), 1e-300);
        for (int i = 0; i < 4; ++i) prod[i] *= e[i] + 1.0 + j - (m + 1);
        lm /= lambda;
        if (std::abs(lm) < 1e-280) break;
    }
    const complexd tail = std::exp(-lambda) / lambda * ring;
    return sign * (secular - tail);
}

} // namespace

complexd KernelSpec::laplace(complexd lambda) const {
    if (!(lambda.real() > 0.0)) throw NonanalyticPoint("eval_laplace: Re lambda must be positive");
    switch (variant_) {
        case KernelVariant::TemperedRiesz: return std::pow(lambda + impl_->eta, 1.0 - impl_->rho);
        case KernelVariant::LaplaceDefined: return impl_->bhat(lambda);
        case KernelVariant::FiniteHistory: return fh_laplace_deriv(impl_->fh_e, impl_->fh_c, 0, lambda);
        case KernelVariant::Tabulated: return laplace_by_quadrature(lambda);
    }
    return {};
}

complexd KernelSpec::laplace_derivative(int j, complexd lambda) const {
    if (j < 0 || j > 3) throw ParameterOutOfRange("laplace_derivative: order must be 0..3");
    if (j == 0) return laplace(lambda);
    switch (variant_) {
        case KernelVariant::TemperedRiesz: {
            double c = 1.0;
            for (int m = 0; m < j; ++m) c *= (1.0 - impl_->rho - m);
            return c * std::pow(lambda + impl_->eta, 1.0 - impl_->rho - j);
        }
        case KernelVariant::FiniteHistory: return fh_laplace_deriv(impl_->fh_e, impl_->fh_c, j, lambda);
        case KernelVariant::LaplaceDefined:
            if (impl_->bhat_derivs[j - 1]) return impl_->bhat_derivs[j - 1](lambda);
            break;
        case KernelVariant::Tabulated: break;
    }
    // central differences, step |lambda| * 1e-5, recursive in order
    const double h = std::abs(lambda) * 1e-5;
    if (h == 0.0) throw DerivativeUnavailable("laplace_derivative: zero step");
    auto lower = [&](complexd l) { return laplace_derivative(j - 1, l); };
    return (lower(lambda + h) - lower(lambda - h)) / (2.0 * h);
}

bool KernelSpec::has_closed_form_derivatives() const {
    switch (variant_) {
        case KernelVariant::TemperedRiesz:
        case KernelVariant::FiniteHistory: return true;
        case KernelVariant::LaplaceDefined:
            return impl_->bhat_derivs[0] && impl_->bhat_derivs[1] && impl_->bhat_derivs[2];
        default: return false;
    }
}

complexd KernelSpec::laplace_by_quadrature(complexd lambda, double rel_tol) const {
    if (!(lambda.real() > 0.0)) throw NonanalyticPoint("laplace_by_quadrature: Re lambda must be positive");
    if (!has_time_domain()) throw QuadratureFailure("laplace_by_quadrature: no time-domain evaluator");
    // finite support for FiniteHistory/Tabulated; exponential cutoff otherwise
    double upper;
    switch (variant_) {
        case KernelVariant::FiniteHistory: upper = 1.0; break;
        case KernelVariant::Tabulated: upper = impl_->tab_t.back(); break;
        default: upper = std::max(1.0, 40.0 / std::max(lambda.real(), 1e-8)); break;
    }
    // oscillation-aware panels: keep |Im lambda| * panel <= ~30 rad
    const double om = std::abs(lambda.imag());
    quad::Options opt;
    opt.rel_tol = rel_tol;
    opt.max_intervals = 20000;
    auto f = [this, lambda](double t) -> complexd {
        return (t <= 0.0) ? complexd(0.0) : std::exp(-lambda * t) * eval(t);
    };
    const double support_lo = (variant_ == KernelVariant::Tabulated) ? impl_->tab_t.front() : 0.0;
    complexd total(0.0);
    double t_split = support_lo;
    if (support_lo == 0.0) {
        // singularity split: geometric panels toward 0 on [0, t_split]
        t_split = std::min(upper, std::max(1e-3, (om > 0 ? 1.0 / om : upper)));
        double hi = t_split;
        for (int k = 0; k < 80; ++k) {
            const double lo = hi * 0.25;
            total += quad::integrate_complex(f, lo, hi, opt);
            hi = lo;
            if (std::abs(f(hi) * hi) < 1e-16 * std::max(1.0, std::abs(total)) && k > 6) break;
            if (hi < 1e-300) break;
        }
    }
    double a = t_split;
    const double panel = (om > 0) ? std::max(30.0 / om, 1e-6) : upper;
    while (a < upper) {
        const double b = std::min(upper, a + panel);
        total += quad::integrate_complex(f, a, b, opt);
        a = b;
    }
    return total;
}

} // namespace stovol
