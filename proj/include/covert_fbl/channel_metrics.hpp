#pragma once

#include <cstdint>

namespace covert_fbl {

/// One operating point of the AWGN link as seen by the warden: blocklength,
/// snr and noise variance. Only theta affects any output; sigma_sq scales the
/// detector threshold.
struct ChannelPoint {
  std::int64_t n = 1;
  double theta = 0.0;
  double sigma_sq = 1.0;

  double eta() const { return 1.0 + theta; }

  /// theta = c * n^{-tau}
  static ChannelPoint from_tau(std::int64_t n, double tau, double c = 1.0, double sigma_sq = 1.0);
};

/// Gamma-scale arguments straddling n/2 and the radiometer threshold R^2.
struct Thresholds {
  double f;
  double g;
  double r_sq;
};

struct KlPair {
  double fwd;  // D(P1 || P0), nats
  double rev;  // D(P0 || P1), nats
};

struct ErrorPair {
  double alpha;  // false alarm
  double beta;   // missed detection
};

struct DivergenceReport {
  double tvd;
  double h_sq;
  double kl_fwd;  // nats
  double kl_rev;  // nats
  double pinsker_ub;
  double hellinger_lb;
  double hellinger_ub_sqrt2;
  double hellinger_ub_improved;
  double sason_exp_ub;
};

enum class InfoUnit { Nats, Bits };

/// Converts an information quantity stored in nats to the requested unit.
double to_unit(double nats, InfoUnit unit);

/// Rejects theta <= 0: f and g are 0/0 forms there.
Thresholds thresholds(const ChannelPoint& cp);

/// P(n/2, f) - P(n/2, g). Returns 0 at theta = 0.
double tvd_exact(const ChannelPoint& cp);

/// alpha + beta computed from the two tails directly, so values far below
/// machine epsilon survive (tvd_exact would round them to 1 - 1 = 0).
double one_minus_tvd(const ChannelPoint& cp);

double hellinger_sq(const ChannelPoint& cp);
KlPair kl_pair(const ChannelPoint& cp);
DivergenceReport bound_family(const ChannelPoint& cp);

/// alpha = Q(n/2, f), beta = P(n/2, g) for the optimal radiometer test.
ErrorPair alpha_beta(const ChannelPoint& cp);

void validate(const ChannelPoint& cp);

}  // namespace covert_fbl
