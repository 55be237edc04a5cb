#pragma once

// Gamma-family kernels used by every other module. All functions are pure
// and safe to call concurrently.

namespace covert_fbl::specfun {

/// Iteration cap shared by the series and continued-fraction paths.
inline constexpr int kMaxIterations = 10000;
/// Per-step relative convergence tolerance.
inline constexpr double kStepTolerance = 1e-15;

struct GammaArgs {
  double a;  // shape, > 0
  double z;  // argument, >= 0
};

/// Regularized incomplete gamma pair, p = gamma(a,z)/Gamma(a), q = Gamma(a,z)/Gamma(a).
struct RegGamma {
  double p;
  double q;
};

double ln_gamma(double a);

/// Evaluates the series for z < a+1 and the continued fraction otherwise.
/// The prefactor z^a e^{-z} / Gamma(a) is formed in log space with a
/// Stirling-corrected expansion, so a up to ~1e7 keeps full relative accuracy.
/// Throws DomainError on invalid args and ConvergenceError if the selected path
/// does not converge within kMaxIterations.
RegGamma reg_gamma_pair(GammaArgs args);

double erfc(double x);

/// Upper tail of the standard normal, Q(x) = P(N(0,1) > x).
double gauss_q(double x);

/// Inverse of gauss_q on (0, 1).
double gauss_q_inv(double p);

/// log1p(x) - x without cancellation near 0. Requires x > -1.
double log1pmx(double x);

/// ln( z^a e^{-z} / Gamma(a+1) ), accurate for large a and z near a.
double log_gamma_prefix(double a, double z);

}  // namespace covert_fbl::specfun
