#pragma once

#include <cstdint>

#include "covert_fbl/channel_metrics.hpp"

namespace covert_fbl::oracle {

inline constexpr std::uint64_t kMinReportedSamples = 10'000;
inline constexpr std::uint64_t kDefaultChunk = 1u << 16;
inline constexpr double kDefaultQuadTol = 1e-12;

struct McConfig {
  std::uint64_t samples = 1'000'000;  // trials per hypothesis
  std::uint64_t seed = 0x5eed;
  std::uint64_t chunk = kDefaultChunk;
};

struct McEstimate {
  double tvd_hat;
  double std_err;
  double alpha_hat;
  double beta_hat;
  double alpha_se;
  double beta_se;
  std::uint64_t false_alarms;
  std::uint64_t misses;
  std::uint64_t samples;
};

void validate(const McConfig& cfg);

/// Radiometer simulation. Energies are drawn as Gamma(n/2, 2 sigma^2) under
/// H0 and Gamma(n/2, 2 sigma^2 (1 + theta)) under H1 and compared with R^2
/// (n sigma^2 when theta = 0). Every (chunk, hypothesis) pair owns a
/// substream derived from the master seed, and counts are integers, so the
/// estimate is bit-identical for any worker count.
///
/// Standard errors use the binomial variance at (k + 1/2)/(N + 1), which
/// stays positive when a count is 0 or N.
McEstimate mc_tvd(const ChannelPoint& cp, const McConfig& cfg, unsigned workers = 1);

/// TVD by adaptive Simpson quadrature of the difference of the two energy
/// densities over [0, R^2], written in the radial variable r = sqrt(x) and
/// evaluated in log space. Throws ConvergenceError on non-convergence.
double quad_tvd(const ChannelPoint& cp, double tol = kDefaultQuadTol);

/// P(chi^2_n <= x) by the same quadrature.
double quad_chi2_cdf(std::int64_t n, double x, double tol = kDefaultQuadTol);

/// 64-bit finalizer used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace covert_fbl::oracle
