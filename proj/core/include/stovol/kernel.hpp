#ifndef STOVOL_KERNEL_HPP
#define STOVOL_KERNEL_HPP

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace stovol {

using complexd = std::complex<double>;
using LaplaceFn = std::function<complexd(complexd)>;
using TimeFn = std::function<double(double)>;

enum class KernelVariant { TemperedRiesz, FiniteHistory, LaplaceDefined, Tabulated };

/// Bundle of the kernel antiderivatives the resolvent scheme consumes:
///   B  = int_0^x b,     B1 = int_0^x B,
///   M1 = int_0^x tau b, M2 = int_0^x tau^2 b.
struct KernelMoments {
    double B = 0, B1 = 0, M1 = 0, M2 = 0;
};

/// A memory kernel b together with its primitive, moments and Laplace
/// transform. Shipped variants:
///   TemperedRiesz:  b(t) = t^(rho-2) e^(-eta t) / Gamma(rho-1)
///   FiniteHistory:  b(t) = (t^((rho-2)/3) - 1)^3 on (0,1), 0 beyond
///   LaplaceDefined: user-supplied bhat (time side optional)
///   Tabulated:      piecewise-linear samples on a grid
class KernelSpec {
  public:
    static KernelSpec tempered_riesz(double rho, double eta = 0.0);
    static KernelSpec finite_history(double rho);
    static KernelSpec laplace_defined(LaplaceFn bhat, std::array<LaplaceFn, 3> derivatives = {},
                                      TimeFn time_eval = {});
    /// bhat(l) = 1 / (l^0.4 + 0.4 ((l+1)^-5 - 1)), with closed-form
    /// derivatives registered up to order 3.
    static KernelSpec laplace_example();
    static KernelSpec tabulated(std::vector<double> t, std::vector<double> values);

    KernelVariant variant() const { return variant_; }
    std::string name() const;

    /// Defining rho for the parametric variants; NaN for the others.
    double rho_hint() const { return rho_hint_; }

    bool has_time_domain() const;
    bool nonnegative() const;

    /// b(t) for t > 0. Throws NonPositiveTime; OutsideTabulatedRange for the
    /// tabulated variant beyond its grid.
    double eval(double t) const;

    /// Derivative db/dt where analytically available (parametric variants),
    /// otherwise DerivativeUnavailable.
    double eval_derivative(double t) const;

    double primitive(double t) const;  // B(t)
    double primitive2(double t) const; // int_0^t B
    double moment1(double t) const;    // int_0^t tau b
    double moment2(double t) const;    // int_0^t tau^2 b
    KernelMoments moments(double t) const;

    /// bhat(lambda), Re lambda > 0 (throws NonanalyticPoint otherwise).
    complexd laplace(complexd lambda) const;

    /// d^j bhat / d lambda^j, j = 0..3. Closed form when registered, else
    /// central differences with step |lambda| * 1e-5.
    complexd laplace_derivative(int j, complexd lambda) const;
    bool has_closed_form_derivatives() const;

    /// bhat by adaptive quadrature of the time-domain integral (oracle
    /// route; singularity split at t = 0). Available when has_time_domain().
    complexd laplace_by_quadrature(complexd lambda, double rel_tol = 1e-10) const;

  private:
    struct Impl;
    KernelSpec() = default;
    KernelVariant variant_{};
    double rho_hint_ = 0;
    std::shared_ptr<const Impl> impl_;
};

} // namespace stovol

#endif
