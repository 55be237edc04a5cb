#include "covert_fbl/expansions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "covert_fbl/errors.hpp"
#include "covert_fbl/specfun.hpp"

namespace covert_fbl::expansions {

namespace {

constexpr double kCrossCheckTol = 1e-6;
constexpr double kMaxPositiveD = 700.0;  // e^d must stay finite

void check_k(int k_max) {
  if (k_max < 0 || k_max > 1000) throw DomainError("k_max must lie in [0, 1000], got " + std::to_string(k_max));
}

void check_config(const ExpansionConfig& cfg) {
  if (cfg.k_max < 0 || cfg.k_max > kMaxTerms) {
    throw DomainError("truncation order must lie in [0, " + std::to_string(kMaxTerms) + "], got " +
                      std::to_string(cfg.k_max));
  }
}

// Phi_k(-u) = e^{-u} sum_j u^j / ((k+1)(k+2)...(k+1+j)) for u < k+1,
// k! P(k+1, u) / u^{k+1} otherwise.
double phi_negative_closed(int k, double u) {
  const double kk = static_cast<double>(k);
  if (u < kk + 1.0) {
    double term = 1.0 / (kk + 1.0);
    double sum = term;
    for (int j = 1; j <= specfun::kMaxIterations; ++j) {
      term *= u / (kk + 1.0 + j);
      sum += term;
      if (term < specfun::kStepTolerance * sum) return std::exp(-u) * sum;
    }
    throw ConvergenceError("phi_tail: closed-form series did not converge", specfun::kMaxIterations);
  }
  const double log_scale = specfun::ln_gamma(kk + 1.0) - (kk + 1.0) * std::log(u);
  return std::exp(log_scale) * specfun::reg_gamma_pair({kk + 1.0, u}).p;
}

double phi_positive_series(int k, double d) {
  const double kk = static_cast<double>(k);
  double pow_fact = 1.0;  // d^m / m!
  double sum = 1.0 / (kk + 1.0);
  for (int m = 1; m <= specfun::kMaxIterations; ++m) {
    pow_fact *= d / m;
    const double term = pow_fact / (kk + m + 1.0);
    sum += term;
    if (m > d && term < specfun::kStepTolerance * sum) return sum;
  }
  throw ConvergenceError("phi_tail: power series did not converge", specfun::kMaxIterations);
}

// Phi_0 = (e^d - 1)/d, Phi_k = (e^d - k Phi_{k-1}) / d. Stable for k < |d|.
std::vector<double> phi_recurrence(double d, int k_max) {
  std::vector<double> phi(static_cast<std::size_t>(k_max) + 1);
  const double ed = std::exp(d);
  phi[0] = std::expm1(d) / d;
  for (int k = 1; k <= k_max; ++k) phi[k] = (ed - k * phi[k - 1]) / d;
  return phi;
}

void cross_check(const std::vector<double>& a, const std::vector<double>& b, double d) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max(std::fabs(a[k]), std::fabs(b[k]));
    if (std::fabs(a[k] - b[k]) > kCrossCheckTol * scale) {
      throw InstabilityError("phi_tail: recurrence and closed form disagree at k = " + std::to_string(k) +
                             ", d = " + std::to_string(d));
    }
  }
}

struct Cut {
  double sum = 0.0;
  int k_used = 0;
  bool lone_head = false;
};

Cut truncate(const std::vector<double>& t, Truncation rule) {
  std::size_t usable = 0;
  while (usable < t.size() && std::isfinite(t[usable])) ++usable;
  if (usable == 0) throw DivergenceError("expansion: leading term is not finite");

  Cut cut;
  if (rule == Truncation::FixedK) {
    for (std::size_t k = 0; k < usable; ++k) cut.sum += t[k];
    cut.k_used = static_cast<int>(usable) - 1;
    return cut;
  }
  std::size_t best = usable;
  for (std::size_t k = 0; k < usable; ++k) {
    if (t[k] == 0.0) continue;
    if (best == usable || std::fabs(t[k]) < std::fabs(t[best])) best = k;
  }
  if (best == usable || best == 0) {
    cut.sum = t[0];
    cut.k_used = 0;
    cut.lone_head = (best == 0);
    return cut;
  }
  for (std::size_t k = 0; k < best; ++k) cut.sum += t[k];
  cut.k_used = static_cast<int>(best) - 1;
  return cut;
}

SeriesSum finish(std::vector<double> terms, Truncation rule) {
  const Cut cut = truncate(terms, rule);
  terms.resize(static_cast<std::size_t>(cut.k_used) + 1);
  return {cut.sum, std::move(terms), cut.k_used};
}

void check_a(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("expansion: a must be finite and > 0");
}

std::vector<double> lower_terms(double a, double z, const CoeffTable& ct, int k_max) {
  const double scale = z * std::exp(specfun::log_gamma_prefix(a, z));
  const std::vector<double> phi = phi_tail(z - a, k_max);
  std::vector<double> t(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) t[k] = scale * ct.c[k] * phi[k];
  return t;
}

std::vector<double> upper_terms(double a, double z, const CoeffTable& ct, int k_max) {
  const double log_scale = std::log(z) + specfun::log_gamma_prefix(a, z);
  const double log_gap = std::log(z - a);
  std::vector<double> t(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) t[k] = ct.c_star[k] * std::exp(log_scale - (k + 1.0) * log_gap);
  return t;
}

double offset_a(std::int64_t n, AOffset off) {
  const double half_n = 0.5 * static_cast<double>(n);
  return off == AOffset::HalfN ? half_n : half_n - 1.0;
}

}  // namespace

// Fixed-K validation sweep: the transition branch is 10-1000x more accurate
// with a = n/2 at K <= 2; the tail branches gain 5-35% with a = n/2 - 1 at K = 2.
AOffset default_offset(Branch) { return AOffset::HalfN; }

ExpansionConfig default_config(Branch branch) {
  return {kMaxTerms, branch, Truncation::Optimal, default_offset(branch)};
}

CoeffTable coeffs(double a, int k_max) {
  check_a(a);
  check_k(k_max);
  const std::size_t len = static_cast<std::size_t>(k_max) + 1;
  CoeffTable t{a, std::vector<double>(len), std::vector<double>(len), std::vector<double>(len)};

  t.c[0] = 1.0;
  if (k_max >= 1) t.c[1] = 0.0;
  for (int k = 1; k < k_max; ++k) t.c[k + 1] = (k * t.c[k] - a * t.c[k - 1]) / (k + 1.0);

  t.c_star[0] = 1.0;
  if (k_max >= 1) t.c_star[1] = 0.0;
  for (int k = 1; k < k_max; ++k) t.c_star[k + 1] = -k * (t.c_star[k] + a * t.c_star[k - 1]);

  t.c_transition[0] = 1.0;
  for (int k = 1; k <= std::min(k_max, 2); ++k) t.c_transition[k] = 0.0;
  for (int k = 2; k < k_max; ++k) {
    t.c_transition[k + 1] = (a * t.c_transition[k - 2] - k * t.c_transition[k]) / (k + 1.0);
  }
  return t;
}

std::vector<double> phi_tail(double d, int k_max) {
  check_k(k_max);
  if (!std::isfinite(d)) throw DomainError("phi_tail: d must be finite");
  std::vector<double> phi(static_cast<std::size_t>(k_max) + 1);

  if (d == 0.0) {
    for (int k = 0; k <= k_max; ++k) phi[k] = 1.0 / (k + 1.0);
    return phi;
  }
  if (d > kMaxPositiveD) throw DomainError("phi_tail: d too large, e^d overflows");

  const double u = std::fabs(d);
  for (int k = 0; k <= k_max; ++k) phi[k] = d < 0.0 ? phi_negative_closed(k, u) : phi_positive_series(k, d);
  if (static_cast<double>(k_max) < u) {
    std::vector<double> rec = phi_recurrence(d, k_max);
    cross_check(rec, phi, d);
    return rec;
  }
  return phi;
}

std::vector<double> phi_transition(double a, double z, int k_max) {
  check_a(a);
  check_k(k_max);
  if (!std::isfinite(z)) throw DomainError("phi_transition: z must be finite");
  std::vector<double> phi(static_cast<std::size_t>(k_max) + 1);
  const double w = (z - a) / a;
  const double gauss = std::exp(-(z - a) * (z - a) / (2.0 * a));
  phi[0] = std::sqrt(std::numbers::pi / (2.0 * a)) * specfun::erfc((z - a) / std::sqrt(2.0 * a));
  if (k_max >= 1) phi[1] = gauss / a;
  double w_pow = w;  // w^{k-1}
  for (int k = 2; k <= k_max; ++k) {
    phi[k] = ((k - 1.0) * phi[k - 2] + w_pow * gauss) / a;
    w_pow *= w;
  }
  return phi;
}

PrefactorDiagnostic gamma_half_n_prefactor(std::int64_t n) {
  if (n < 1) throw DomainError("gamma_half_n_prefactor: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double half_n = 0.5 * nn;
  const double closed = -half_n + half_n * std::log(half_n) + 0.25 * std::log(nn) + 0.5 * std::log(std::numbers::pi) +
                        1.25 * std::numbers::ln2;
  const double exact = specfun::ln_gamma(half_n);
  return {closed, exact, closed - exact};
}

SeriesSum lower_gamma_expansion(double a, double z, const ExpansionConfig& cfg) {
  check_config(cfg);
  check_a(a);
  if (!(z > 0.0 && z < a)) throw DomainError("lower_gamma_expansion: need 0 < z < a");
  const CoeffTable ct = coeffs(a, cfg.k_max);
  return finish(lower_terms(a, z, ct, cfg.k_max), cfg.truncation);
}

SeriesSum upper_gamma_expansion(double a, double z, const ExpansionConfig& cfg) {
  check_config(cfg);
  check_a(a);
  if (!(z > a) || !std::isfinite(z)) throw DomainError("upper_gamma_expansion: need z > a");
  const CoeffTable ct = coeffs(a, cfg.k_max);
  return finish(upper_terms(a, z, ct, cfg.k_max), cfg.truncation);
}

SeriesSum upper_gamma_transition(double a, double z, const ExpansionConfig& cfg) {
  check_config(cfg);
  check_a(a);
  if (!(z >= 0.0)) throw DomainError("upper_gamma_transition: need z >= 0");
  const CoeffTable ct = coeffs(a, cfg.k_max);
  const double scale = a * std::exp(specfun::log_gamma_prefix(a, a));
  const std::vector<double> phi = phi_transition(a, z, cfg.k_max);
  std::vector<double> t(phi.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = scale * ct.c_transition[k] * phi[k];
  return finish(std::move(t), cfg.truncation);
}

ExpansionResult tvd_expansion(const ChannelPoint& cp, const ExpansionConfig& cfg) {
  check_config(cfg);
  const Thresholds th = thresholds(cp);
  const double half_n = 0.5 * static_cast<double>(cp.n);
  const double a = offset_a(cp.n, cfg.a_offset);
  if (!(a > 0.0)) throw DomainError("tvd_expansion: a = n/2 - 1 requires n > 2");

  ExpansionResult r;
  r.branch = cfg.branch;
  r.a_offset = cfg.a_offset;
  r.a = a;
  r.taylor_x = th.f / half_n - 1.0;
  r.taylor_y = 1.0 - th.g / half_n;
  const CoeffTable ct = coeffs(a, cfg.k_max);

  if (cfg.branch == Branch::Transition) {
    const double scale = a * std::exp(specfun::log_gamma_prefix(a, a));
    const std::vector<double> phi_g = phi_transition(a, th.g, cfg.k_max);
    const std::vector<double> phi_f = phi_transition(a, th.f, cfg.k_max);
    std::vector<double> t(phi_g.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = scale * ct.c_transition[k] * (phi_g[k] - phi_f[k]);
    const Cut cut = truncate(t, cfg.truncation);
    if (cut.lone_head && std::fabs(t[0]) > std::fabs(cut.sum)) {
      throw DivergenceError("tvd_expansion: transition series diverges from k = 0");
    }
    t.resize(static_cast<std::size_t>(cut.k_used) + 1);
    r.raw_value = cut.sum;
    r.terms = std::move(t);
    r.k_used = cut.k_used;

    const double spread = std::max(std::fabs(th.f - a), std::fabs(th.g - a));
    if (spread > std::pow(a, 2.0 / 3.0)) {
      r.regime_ok = false;
      r.regime_note = "max|z - a| = " + std::to_string(spread) + " exceeds a^(2/3); transition expansion out of regime";
    }
  } else {
    if (!(th.g < a && th.f > a)) {
      throw DomainError("tvd_expansion: tail branch needs g < a < f; use a = n/2 or the transition branch");
    }
    const std::vector<double> up = upper_terms(a, th.f, ct, cfg.k_max);
    const std::vector<double> lo = lower_terms(a, th.g, ct, cfg.k_max);
    const Cut cut_up = truncate(up, cfg.truncation);
    const Cut cut_lo = truncate(lo, cfg.truncation);
    r.raw_value = 1.0 - (cut_up.sum + cut_lo.sum);
    if ((cut_up.lone_head && std::fabs(up[0]) > std::fabs(r.raw_value)) ||
        (cut_lo.lone_head && std::fabs(lo[0]) > std::fabs(r.raw_value))) {
      throw DivergenceError("tvd_expansion: tail series diverges from k = 0");
    }
    r.k_used = std::max(cut_up.k_used, cut_lo.k_used);
    r.terms.assign(static_cast<std::size_t>(r.k_used) + 1, 0.0);
    for (int k = 0; k <= r.k_used; ++k) {
      const double u = k <= cut_up.k_used ? up[k] : 0.0;
      const double l = k <= cut_lo.k_used ? lo[k] : 0.0;
      r.terms[k] = -(u + l);
    }

    const double gap = std::min(th.f - a, a - th.g);
    if (gap < std::sqrt(a)) {
      r.regime_ok = false;
      r.regime_note = "min(f - a, a - g) = " + std::to_string(gap) + " below sqrt(a); tail expansion out of regime";
    }
  }

  r.value = std::clamp(r.raw_value, 0.0, 1.0);
  r.exact = tvd_exact(cp);
  r.rel_err_vs_exact = r.exact > 0.0 ? std::fabs(r.value - r.exact) / r.exact : std::fabs(r.value);
  return r;
}

double reference_rounding_floor(const ChannelPoint& cp) {
  const Thresholds th = thresholds(cp);
  const double a = 0.5 * static_cast<double>(cp.n);
  // z p(z) = a z^a e^{-z} / Gamma(a + 1)
  const double weight = std::exp(specfun::log_gamma_prefix(a, th.f)) + std::exp(specfun::log_gamma_prefix(a, th.g));
  return std::numeric_limits<double>::epsilon() * a * weight;
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::TailLower: return "tail_lower";
    case Branch::TailUpper: return "tail_upper";
    case Branch::Transition: return "transition";
  }
  return "unknown";
}

const char* to_string(AOffset offset) { return offset == AOffset::HalfN ? "half_n" : "half_n_minus_1"; }

}  // namespace covert_fbl::expansions
