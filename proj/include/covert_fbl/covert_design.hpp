#pragma once

#include <cstdint>
#include <span>

namespace covert_fbl {

struct CovertBudget {
  double delta;  // TVD budget at the warden
  double eps;    // average decoding error at the receiver
};

struct PowerBracket {
  double theta_necessary;
  double theta_sufficient;
  double theta_exact;
  double y;        // (1/4)(1-delta)^{4/n}
  double y0;       // (1/4)(1-delta^2)^{2/n}
  double lambda;   // sqrt(1 - 4y)
  double lambda1;  // sqrt(1 - 4y0)
};

/// All quantities in bits.
struct ThroughputReport {
  double capacity_bits;  // C at theta_exact, per channel use
  double dispersion;     // V at theta_exact, bits^2
  double log_m;          // normal approximation at theta_exact
  double upper_bits;
  double lower_bits;
  PowerBracket bracket;
};

struct SecondOrderSlopes {
  double slope_first;
  double slope_second;
};

inline constexpr double kDefaultPowerTol = 1e-10;
inline constexpr int kPowerMaxIterations = 200;

/// Largest theta compatible with H^2 <= delta (TVD <= delta is impossible above it).
double power_necessary(std::int64_t n, double delta);

/// Largest theta for which the improved Hellinger upper bound already
/// guarantees TVD <= delta.
double power_sufficient(std::int64_t n, double delta);

/// Root of tvd_exact(n, theta) = delta by bisection, starting from the
/// sufficient/necessary bracket. Throws BracketError or ToleranceError.
double power_exact(std::int64_t n, double delta, double tol = kDefaultPowerTol);

PowerBracket power_bracket(std::int64_t n, double delta, double tol = kDefaultPowerTol);

/// C = (1/2) log2(1 + theta)
double capacity_bits(double theta);
/// V = theta (theta + 2) / (2 (theta + 1)^2) * log2(e)^2
double dispersion_bits2(double theta);

/// n C - sqrt(n V) Q^{-1}(eps) + (1/2) log2 n, with the O(1) term set to 0.
double throughput_normal(std::int64_t n, double eps, double theta);

ThroughputReport throughput_bounds(std::int64_t n, const CovertBudget& budget);

/// Least-squares log-log slopes of the first (n C(theta_N)) and second
/// (sqrt(n V(theta_S)) Q^{-1}(eps)) terms of the throughput upper bound.
SecondOrderSlopes second_order_probe(const CovertBudget& budget, std::span<const std::int64_t> n_grid);

void validate(const CovertBudget& budget);

}  // namespace covert_fbl
