#pragma once

#include <cstdint>
#include <vector>

#include "covert_fbl/channel_metrics.hpp"

namespace covert_fbl::asymptotics {

enum class Quantity { Tvd, OneMinusTvd, KlRev, KlFwd, HSq };

struct SweepSpec {
  double tau;
  double c = 1.0;
  std::vector<std::int64_t> n_grid;
  Quantity quantity = Quantity::Tvd;
};

struct SweepPoint {
  std::int64_t n;
  double value;
};

enum class RateModel { PowerLaw, StretchedExp };

struct RateFit {
  RateModel model;
  double p;          // exponent
  double coef;       // A for PowerLaw, c for StretchedExp
  double log_a;      // ln A
  double r_squared;
  std::size_t points_used;
  // Band for the superhalf slope; NaN for other fits, where in_band is true.
  double band_lo;
  double band_hi;
  bool in_band;
};

struct KlAsymptoteRow {
  std::int64_t n;
  double exact_kl_rev_bits;
  double asymptote_bits;
  double ratio;  // exact / asymptote
};

inline constexpr double kSaturationFloor = 1e-14;
inline constexpr double kUnderflowFloor = 1e-300;
inline constexpr double kSuperhalfMargin = 0.05;
inline constexpr std::size_t kMinFitPoints = 4;

/// `points` log-spaced integers from lo to hi inclusive, duplicates removed.
std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, std::size_t points);

void validate(const SweepSpec& spec);

/// Quantity at theta = c n^{-tau} for each n, in grid order. KL values in nats.
std::vector<SweepPoint> sweep(const SweepSpec& spec, unsigned workers = 1);

/// Stretched-exponential fit ln(1 - V) = ln A - coef n^p over the largest-n
/// half of the grid. The exponent is found by minimizing the residual of the
/// inner linear fit in n^p (profile least squares).
RateFit fit_subhalf(const SweepSpec& spec, unsigned workers = 1);

/// Regression of ln(-ln(1 - V)) on ln n. Ignores ln A; kept for comparison.
RateFit fit_subhalf_loglog(const SweepSpec& spec, unsigned workers = 1);

/// Power-law fit ln V = ln A + p ln n over the largest-n half of the grid,
/// with band [1 - 2 tau - margin, (1 - 2 tau)/2 + margin].
RateFit fit_superhalf(const SweepSpec& spec, unsigned workers = 1);

/// Exact reverse KL against c^2 n^{1-2 tau} / (4 ln 2) bits.
std::vector<KlAsymptoteRow> kl_asymptote_check(const SweepSpec& spec, unsigned workers = 1);

const char* to_string(Quantity q);

}  // namespace covert_fbl::asymptotics
