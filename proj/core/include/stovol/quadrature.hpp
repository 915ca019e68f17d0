#ifndef STOVOL_QUADRATURE_HPP
#define STOVOL_QUADRATURE_HPP

#include <complex>
#include <functional>

namespace stovol::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

/// Adaptive Gauss-Kronrod 15(7) on [a, b].
/// Throws QuadratureFailure if the interval budget is exhausted before the
/// tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b, Options opt = {});

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                                       double b, Options opt = {});

/// Integral over [a, b], 0 < a < b, performed in log space; suited to
/// integrands supported over many decades.
double integrate_log_axis(const std::function<double(double)>& f, double a, double b, Options opt = {});

/// \int_a^b f with an algebraic endpoint singularity at a (f ~ (t-a)^p,
/// p > -1): geometric subdivision toward the endpoint.
double integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                   Options opt = {});

/// Local decay power of |f| near x (two-point log slope), for algebraic
/// tail estimates: tail(x) ~ |f(x)| * x / (p - 1) when p > 1.
double algebraic_tail_estimate(const std::function<double(double)>& f, double x);

} // namespace stovol::quad

#endif
