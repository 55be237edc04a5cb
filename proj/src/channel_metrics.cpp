#include "covert_fbl/channel_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "covert_fbl/errors.hpp"
#include "covert_fbl/specfun.hpp"

namespace covert_fbl {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct TailPair {
  specfun::RegGamma at_f;
  specfun::RegGamma at_g;
  double a;
  double g;
};

TailPair tails(const ChannelPoint& cp) {
  const Thresholds t = thresholds(cp);
  const double a = 0.5 * static_cast<double>(cp.n);
  return {specfun::reg_gamma_pair({a, t.f}), specfun::reg_gamma_pair({a, t.g}), a, t.g};
}

// ln of the Bhattacharyya coefficient (4(1+theta)/(2+theta)^2)^{n/4}, base
// written as 1 - theta^2/(2+theta)^2.
double log_bhattacharyya(const ChannelPoint& cp) {
  const double u = cp.theta / (2.0 + cp.theta);
  return 0.25 * static_cast<double>(cp.n) * std::log1p(-u * u);
}

}  // namespace

ChannelPoint ChannelPoint::from_tau(std::int64_t n, double tau, double c, double sigma_sq) {
  if (n < 1) throw DomainError("blocklength n must be >= 1");
  if (!(c > 0.0) || !std::isfinite(tau)) throw DomainError("from_tau: need c > 0 and finite tau");
  return {n, c * std::pow(static_cast<double>(n), -tau), sigma_sq};
}

void validate(const ChannelPoint& cp) {
  if (cp.n < 1) throw DomainError("blocklength n must be >= 1, got " + std::to_string(cp.n));
  if (!std::isfinite(cp.theta) || cp.theta < 0.0) {
    throw DomainError("snr theta must be finite and >= 0, got " + std::to_string(cp.theta));
  }
  if (!std::isfinite(cp.sigma_sq) || !(cp.sigma_sq > 0.0)) {
    throw DomainError("noise variance must be finite and > 0");
  }
}

double to_unit(double nats, InfoUnit unit) {
  return unit == InfoUnit::Bits ? nats / std::numbers::ln2 : nats;
}

Thresholds thresholds(const ChannelPoint& cp) {
  validate(cp);
  if (!(cp.theta > 0.0)) throw DomainError("thresholds: theta must be > 0 (f, g are 0/0 at theta = 0)");
  const double half_n = 0.5 * static_cast<double>(cp.n);
  const double ratio = std::log1p(cp.theta) / cp.theta;  // ln(1+theta)/theta
  const double g = half_n * ratio;
  const double f = half_n * (1.0 + cp.theta) * ratio;
  return {f, g, 2.0 * cp.sigma_sq * f};
}

double tvd_exact(const ChannelPoint& cp) {
  validate(cp);
  if (cp.theta == 0.0) return 0.0;
  const TailPair t = tails(cp);
  // Both arguments on the continued-fraction side: the upper tails carry the
  // significant digits.
  if (t.g >= t.a + 1.0) return clamp01(t.at_g.q - t.at_f.q);
  return clamp01(t.at_f.p - t.at_g.p);
}

double one_minus_tvd(const ChannelPoint& cp) {
  validate(cp);
  if (cp.theta == 0.0) return 1.0;
  const TailPair t = tails(cp);
  return clamp01(t.at_f.q + t.at_g.p);
}

ErrorPair alpha_beta(const ChannelPoint& cp) {
  validate(cp);
  if (cp.theta == 0.0) throw DomainError("alpha_beta: theta must be > 0");
  const TailPair t = tails(cp);
  return {t.at_f.q, t.at_g.p};
}

double hellinger_sq(const ChannelPoint& cp) {
  validate(cp);
  if (cp.theta == 0.0) return 0.0;
  return clamp01(-std::expm1(log_bhattacharyya(cp)));
}

KlPair kl_pair(const ChannelPoint& cp) {
  validate(cp);
  if (cp.theta == 0.0) return {0.0, 0.0};
  const double half_n = 0.5 * static_cast<double>(cp.n);
  // theta - ln(1+theta)
  const double fwd = -half_n * specfun::log1pmx(cp.theta);
  // ln(1+theta) - theta/(1+theta) = -log1pmx(-u) with u = theta/(1+theta)
  const double u = cp.theta / (1.0 + cp.theta);
  const double rev = -half_n * specfun::log1pmx(-u);
  return {fwd, rev};
}

DivergenceReport bound_family(const ChannelPoint& cp) {
  validate(cp);
  DivergenceReport r{};
  r.tvd = tvd_exact(cp);
  r.h_sq = hellinger_sq(cp);
  const KlPair kl = kl_pair(cp);
  r.kl_fwd = kl.fwd;
  r.kl_rev = kl.rev;
  r.pinsker_ub = clamp01(std::sqrt(0.5 * kl.fwd));
  r.hellinger_lb = r.h_sq;
  r.hellinger_ub_sqrt2 = clamp01(std::numbers::sqrt2 * std::sqrt(r.h_sq));
  // sqrt(1 - (1 - H^2)^2) = sqrt(1 - BC^2), evaluated from ln BC
  r.hellinger_ub_improved = clamp01(std::sqrt(-std::expm1(2.0 * log_bhattacharyya(cp))));
  r.sason_exp_ub = clamp01(std::sqrt(-std::expm1(-kl.fwd)));
  return r;
}

}  // namespace covert_fbl
