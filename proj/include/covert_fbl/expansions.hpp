#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covert_fbl/channel_metrics.hpp"

namespace covert_fbl::expansions {

/// Which incomplete-gamma expansion drives the approximation.
///
/// At the single-function level the three branches are distinct:
///   TailLower   gamma(a+1, z) convergent series, z < a
///   TailUpper   Gamma(a+1, z) asymptotic series, z > a
///   Transition  Gamma(a+1, z) erfc-based expansion, |z - a| = o(a^{2/3})
/// At the TVD level TailLower and TailUpper both select the combined
/// small-tau form 1 - [Gamma(a+1, f) + gamma(a+1, g)] / Gamma(a+1), which
/// needs one series of each kind.
enum class Branch { TailLower, TailUpper, Transition };

enum class Truncation { FixedK, Optimal };

/// a = n/2 or a = n/2 - 1. Both give an exact identity for the TVD (for
/// a = n/2 the boundary terms f^a e^{-f} and g^a e^{-g} cancel); they differ
/// only in how fast the truncated series converge.
enum class AOffset { HalfN, HalfNMinus1 };

inline constexpr int kMaxTerms = 60;

struct ExpansionConfig {
  int k_max = kMaxTerms;
  Branch branch = Branch::Transition;
  Truncation truncation = Truncation::Optimal;
  AOffset a_offset = AOffset::HalfN;
};

/// Offset chosen by the validation harness for each branch.
AOffset default_offset(Branch branch);

/// Default configuration for a branch (optimal truncation, K = 60, tuned offset).
ExpansionConfig default_config(Branch branch);

struct CoeffTable {
  double a;
  std::vector<double> c;             // tail-branch c_k(a)
  std::vector<double> c_star;        // (-1)^k k! c_k(a), own recurrence
  std::vector<double> c_transition;  // transition-branch c_k(a)
};

CoeffTable coeffs(double a, int k_max);

/// Phi_k(d) = int_0^1 s^k e^{d s} ds for k = 0..k_max.
///
/// For d < 0 the closed finite sum is evaluated as k! P(k+1, -d) / (-d)^{k+1}
/// in log space; the forward recurrence is used (and cross-checked against
/// it) only while it is stable, i.e. k_max < |d|. d > 0 uses the positive
/// power series, again cross-checked against the recurrence when stable.
/// Throws InstabilityError if the two routes disagree by more than 1e-6.
std::vector<double> phi_tail(double d, int k_max);

/// Phi_k(a, z) = int_{(z-a)/a}^inf v^k e^{-a v^2 / 2} dv for k = 0..k_max.
std::vector<double> phi_transition(double a, double z, int k_max);

struct PrefactorDiagnostic {
  double closed_form_value;  // ln of e^{-n/2} (n/2)^{n/2} n^{1/4} sqrt(pi) 2^{5/4}
  double exact_value;  // ln Gamma(n/2)
  double discrepancy;  // closed_form_value - exact_value
};

PrefactorDiagnostic gamma_half_n_prefactor(std::int64_t n);

struct SeriesSum {
  double value;
  std::vector<double> terms;
  int k_used;
};

/// Regularized P(a+1, z) from the convergent expansion (requires z < a).
SeriesSum lower_gamma_expansion(double a, double z, const ExpansionConfig& cfg);
/// Regularized Q(a+1, z) from the asymptotic tail expansion (requires z > a).
SeriesSum upper_gamma_expansion(double a, double z, const ExpansionConfig& cfg);
/// Regularized Q(a+1, z) from the transition expansion.
SeriesSum upper_gamma_transition(double a, double z, const ExpansionConfig& cfg);

struct ExpansionResult {
  double value = 0.0;      // clamped to [0, 1]
  double raw_value = 0.0;  // before clamping
  /// Per-k contributions to the TVD. For the tail branches value = 1 + sum(terms).
  std::vector<double> terms;
  int k_used = 0;
  double exact = 0.0;
  double rel_err_vs_exact = 0.0;
  Branch branch = Branch::Transition;
  AOffset a_offset = AOffset::HalfN;
  double a = 0.0;
  /// f/(n/2) = 1 + x and g/(n/2) = 1 - y.
  double taylor_x = 0.0;
  double taylor_y = 0.0;
  bool regime_ok = true;
  std::string regime_note;
};

/// Truncated-series approximation of the TVD with all prefactors computed
/// exactly through ln Gamma. Throws DivergenceError when optimal truncation
/// keeps only k = 0 and that term exceeds the assembled value.
ExpansionResult tvd_expansion(const ChannelPoint& cp, const ExpansionConfig& cfg);

/// Absolute TVD uncertainty caused by rounding f and g to double precision:
/// eps_mach (f p(f) + g p(g)) with p the density of the underlying gamma law.
/// Relative errors below a small multiple of floor / TVD are not resolvable.
double reference_rounding_floor(const ChannelPoint& cp);

const char* to_string(Branch branch);
const char* to_string(AOffset offset);

}  // namespace covert_fbl::expansions
