#ifndef STOVOL_SPECIAL_FUNCTIONS_HPP
#define STOVOL_SPECIAL_FUNCTIONS_HPP

#include <complex>

namespace stovol::sf {

/// sin(pi x) with argument reduction; exact zeros at integer x.
double sinpi(double x);

/// Gamma function via a 9-term Lanczos approximation (g = 7), relative
/// accuracy around 1e-13 on the real line away from the poles.
double gamma_lanczos(double x);

/// 1/Gamma(x); zero at nonpositive integers.
double rgamma(double x);

double log_gamma(double x);

/// Lower incomplete gamma gamma(a, x), a > 0, x >= 0.
/// Series for x < a + 1, continued fraction otherwise.
double lower_incomplete_gamma(double a, double x);

/// gamma(a, z) for complex z, Re z >= 0. Series for |z| <= 25, asymptotic
/// expansion of Gamma(a) - Gamma(a, z) beyond. Needs |a| < 4 or so; used
/// for kernel Laplace transforms where a in (0, 4).
std::complex<double> lower_incomplete_gamma(double a, std::complex<double> z);

/// Mittag-Leffler E_rho(z) on the nonpositive real axis, 0 < rho <= 2.
/// Compensated power series for |z|^(1/rho) <= 16; for larger |z| the
/// algebraic expansion -sum z^{-k}/Gamma(1-rho k) plus, for rho >= 1, the
/// damped-oscillatory pair (2/rho) e^{r cos(pi/rho)} cos(r sin(pi/rho)),
/// r = |z|^(1/rho). Worst-case absolute error ~1e-7 near the seam.
double mittag_leffler(double rho, double z);

/// Inverse of the standard normal CDF (Wichura's PPND16).
double inverse_normal_cdf(double p);

} // namespace stovol::sf

#endif
