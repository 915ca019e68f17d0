#ifndef STOVOL_MILD_HPP
#define STOVOL_MILD_HPP

#include "stovol/noise.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stovol {

enum class ScalarTag { Sin, Atan };

double scalar_apply(ScalarTag tag, double x);

/// Collocated sine transform between mode coefficients (against the
/// orthonormal e_k = sqrt(2) sin(k pi x)) and point values on the interior
/// grid x_m = m/(M+1), m = 1..M. Odd extension keeps Dirichlet values exact.
class SineTransform {
  public:
    SineTransform(int n_modes, int n_points);
    int n_points() const { return m_; }
    void to_physical(const std::vector<double>& coeffs, std::vector<double>& values) const;
    void to_coefficients(const std::vector<double>& values, std::vector<double>& coeffs) const;

  private:
    int n_, m_;
    std::vector<double> table_; // sin(k pi x_m), k-major
};

struct FMap {
    enum class Kind { Zero, DiagonalLinear, Nemytskii };
    Kind kind = Kind::Zero;
    std::vector<double> diag;
    ScalarTag tag = ScalarTag::Sin;
    double lipschitz = 1.0;

    static FMap zero();
    static FMap diagonal_linear(std::vector<double> c);
    static FMap nemytskii(ScalarTag tag, double lipschitz = 1.0);
};

struct GMap {
    enum class Kind { ZeroNoise, AdditiveIdentity, DiagonalMultiplicative, NemytskiiMultiplicative };
    Kind kind = Kind::AdditiveIdentity;
    std::vector<double> diag;
    ScalarTag tag = ScalarTag::Sin;
    double lipschitz = 1.0;

    static GMap zero_noise();
    static GMap additive_identity();
    static GMap diagonal_multiplicative(std::vector<double> g);
    static GMap nemytskii_multiplicative(ScalarTag tag, double lipschitz = 1.0);

    bool additive() const { return kind == Kind::ZeroNoise || kind == Kind::AdditiveIdentity; }
};

SpectralField apply_F(const FMap& f, const SpectralBasis& basis, const SpectralField& u,
                      const SineTransform& tr);

/// G(u) dW as a spectral field; dw holds the increment coordinates.
SpectralField apply_G_increment(const GMap& g, const SpectralBasis& basis, const SpectralField& u,
                                const std::vector<double>& dw, const SineTransform& tr);

struct U0Spec {
    SpectralField field;
    bool random_scaled = false; // multiply by a per-path standard Gaussian
    static U0Spec deterministic(SpectralField f);
};

struct ProblemSpec {
    KernelSpec kernel;
    SpectralBasis basis;
    CovarianceSpec cov;
    FMap f_map;
    GMap g_map;
    U0Spec u0;
    double horizon = 1.0;
    double r = 0;   // spatial regularity parameter, r < 1
    double rho = 0; // kernel growth exponent
    int p_moment = 2;

    double s0() const { return r - 1.0 + 1.0 / rho; } // fixed-point space exponent
};

struct PicardOptions {
    double alpha0 = 0;     // 0: use 4 (C_F + C_G)^2 max(1, T)
    int max_alpha_doublings = 10;
    double tol = 1e-8;
    int max_iter = 30;
    double ratio_bound = 0.9;
};

struct PicardCertificate {
    double alpha = 0;
    std::vector<double> distances; // d_n in the e^{-alpha t} weighted sup norm
    double geometric_ratio = 0;    // max d_{n+1}/d_n after the first step
    int iterations = 0;
    bool converged = false;
};

struct PicardResult {
    // node-major path: u[j * n_modes + (k-1)]
    std::vector<double> path;
    PicardCertificate certificate;
};

/// Pathwise Picard iteration of the variation-of-constants map with frozen
/// noise increments. The iteration itself is alpha-independent; alpha only
/// weights the convergence metric, so the certificate scans the alpha
/// ladder on the recorded difference profiles and reports the smallest
/// alpha whose measured ratio clears the bound. Throws NoContraction when
/// none does.
PicardResult picard_solve(const ProblemSpec& ps, const ResolventBank& bank, std::uint64_t seed,
                          std::uint64_t path_index, const PicardOptions& opt = {},
                          std::optional<std::vector<double>> initial_iterate = std::nullopt);

/// What an ensemble run measures.
struct MeasurementPlan {
    std::vector<double> s_exponents;
    std::vector<int> base_nodes;       // base points t for increments
    std::vector<int> lag_steps;        // dyadic lags in steps
    int p_moment = 2;
    bool want_sup = false;             // per-path sup_t of the Hdot^s norms
    std::vector<double> beta_grid;     // pathwise Holder quotient exponents
    std::vector<int> norm_nodes;       // nodes for per-node L^p(Omega) norms
};

struct EnsembleStats {
    int n_paths = 0;
    std::vector<double> s_exponents;
    // increment moments: mean over paths of ||u(t+h)-u(t)||^p, indexed
    // [s][lag] (averaged over base nodes), plus stderr of the mean
    std::vector<std::vector<double>> incr_moment, incr_moment_se;
    std::vector<int> lag_steps;
    // per-path sup-norm samples, [s][path] (squared-norm sup), for maximal
    // bounds; empty unless want_sup
    std::vector<std::vector<double>> sup_samples;
    // pathwise Holder quotients, [s][beta][path]
    std::vector<std::vector<std::vector<double>>> holder_quotients;
    std::vector<double> beta_grid;
    // per-node empirical L^p norms, [s][node index]
    std::vector<std::vector<double>> node_norms;
    std::vector<int> norm_nodes;
    int picard_failures = 0;
    std::vector<std::uint64_t> failed_paths;
};

EnsembleStats run_ensemble(const ProblemSpec& ps, const ResolventBank& bank, std::uint64_t seed, int n_paths,
                           const MeasurementPlan& plan, const PicardOptions& opt = {}, int n_threads = 0);

} // namespace stovol

#endif
