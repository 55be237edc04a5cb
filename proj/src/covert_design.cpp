#include "covert_fbl/covert_design.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "covert_fbl/channel_metrics.hpp"
#include "covert_fbl/errors.hpp"
#include "covert_fbl/regression.hpp"
#include "covert_fbl/specfun.hpp"

namespace covert_fbl {

namespace {

void check_n(std::int64_t n) {
  if (n < 1) throw DomainError("blocklength n must be >= 1, got " + std::to_string(n));
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("TVD budget delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

// eta = (1 - 2y + sqrt(1 - 4y)) / (2y) with y = (1 - lambda^2)/4 reduces to
// (1 + lambda)/(1 - lambda), so theta = 2 lambda / (1 - lambda).
double theta_from_lambda(double lambda) { return 2.0 * lambda / (1.0 - lambda); }

// lambda = sqrt(1 - base^{exponent}) evaluated without cancellation.
double lambda_of(double log_base, double exponent) {
  return std::sqrt(-std::expm1(exponent * log_base));
}

double lambda_necessary(std::int64_t n, double delta) {
  return lambda_of(std::log1p(-delta), 4.0 / static_cast<double>(n));
}

double lambda_sufficient(std::int64_t n, double delta) {
  return lambda_of(std::log1p(-delta * delta), 2.0 / static_cast<double>(n));
}

}  // namespace

void validate(const CovertBudget& budget) {
  check_delta(budget.delta);
  if (!(budget.eps > 0.0 && budget.eps < 1.0)) {
    throw DomainError("decoding error eps must lie in (0, 1), got " + std::to_string(budget.eps));
  }
}

double power_necessary(std::int64_t n, double delta) {
  check_n(n);
  check_delta(delta);
  return theta_from_lambda(lambda_necessary(n, delta));
}

double power_sufficient(std::int64_t n, double delta) {
  check_n(n);
  check_delta(delta);
  return theta_from_lambda(lambda_sufficient(n, delta));
}

double power_exact(std::int64_t n, double delta, double tol) {
  check_n(n);
  check_delta(delta);
  if (!(tol > 0.0)) throw DomainError("power_exact: tol must be > 0");

  auto tvd_at = [n](double theta) { return tvd_exact({n, theta, 1.0}); };

  double lo = power_sufficient(n, delta);
  double hi = power_necessary(n, delta);
  constexpr int kMaxExpansions = 60;
  for (int i = 0; tvd_at(lo) > delta; ++i) {
    if (i == kMaxExpansions) throw BracketError("power_exact: could not bracket root from below", lo, hi);
    lo *= 0.5;
  }
  for (int i = 0; tvd_at(hi) < delta; ++i) {
    if (i == kMaxExpansions) throw BracketError("power_exact: could not bracket root from above", lo, hi);
    hi *= 2.0;
  }

  double best = lo;
  double best_err = std::fabs(tvd_at(lo) - delta);
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = tvd_at(mid);
    const double err = std::fabs(v - delta);
    if (err < best_err) {
      best = mid;
      best_err = err;
    }
    if (err <= tol) return mid;
    if (v < delta) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (!(hi > lo)) break;
  }
  throw ToleranceError("power_exact: |tvd - delta| = " + std::to_string(best_err) +
                           " above tolerance after bisection",
                       best);
}

PowerBracket power_bracket(std::int64_t n, double delta, double tol) {
  PowerBracket b{};
  b.theta_necessary = power_necessary(n, delta);
  b.theta_sufficient = power_sufficient(n, delta);
  b.theta_exact = power_exact(n, delta, tol);
  b.lambda = lambda_necessary(n, delta);
  b.lambda1 = lambda_sufficient(n, delta);
  b.y = 0.25 * std::exp(4.0 / static_cast<double>(n) * std::log1p(-delta));
  b.y0 = 0.25 * std::exp(2.0 / static_cast<double>(n) * std::log1p(-delta * delta));
  return b;
}

double capacity_bits(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError("capacity: theta must be finite and >= 0");
  return 0.5 * std::log1p(theta) / std::numbers::ln2;
}

double dispersion_bits2(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError("dispersion: theta must be finite and >= 0");
  const double log2e = std::numbers::log2e;
  return 0.5 * theta * (theta + 2.0) / ((theta + 1.0) * (theta + 1.0)) * log2e * log2e;
}

namespace {

double normal_approx(std::int64_t n, double eps, double theta_first, double theta_dispersion) {
  const double nn = static_cast<double>(n);
  return nn * capacity_bits(theta_first) -
         std::sqrt(nn * dispersion_bits2(theta_dispersion)) * specfun::gauss_q_inv(eps) +
         0.5 * std::log2(nn);
}

}  // namespace

double throughput_normal(std::int64_t n, double eps, double theta) {
  check_n(n);
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  return normal_approx(n, eps, theta, theta);
}

ThroughputReport throughput_bounds(std::int64_t n, const CovertBudget& budget) {
  check_n(n);
  validate(budget);
  ThroughputReport r{};
  r.bracket = power_bracket(n, budget.delta);
  const double theta_n = r.bracket.theta_necessary;
  const double theta_s = r.bracket.theta_sufficient;
  r.upper_bits = normal_approx(n, budget.eps, theta_n, theta_s);
  r.lower_bits = normal_approx(n, budget.eps, theta_s, theta_n);
  r.capacity_bits = capacity_bits(r.bracket.theta_exact);
  r.dispersion = dispersion_bits2(r.bracket.theta_exact);
  r.log_m = normal_approx(n, budget.eps, r.bracket.theta_exact, r.bracket.theta_exact);
  return r;
}

SecondOrderSlopes second_order_probe(const CovertBudget& budget, std::span<const std::int64_t> n_grid) {
  validate(budget);
  if (n_grid.size() < 5) throw DomainError("second_order_probe: need at least 5 grid points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw DomainError("second_order_probe: grid must be strictly increasing positive blocklengths");
    }
  }
  if (static_cast<double>(n_grid.back()) < 1e3 * static_cast<double>(n_grid.front())) {
    throw DomainError("second_order_probe: grid must span at least three decades");
  }

  const double q_inv = specfun::gauss_q_inv(budget.eps);
  if (q_inv == 0.0) throw DomainError("second_order_probe: eps = 0.5 makes the dispersion term vanish");
  std::vector<double> log_n;
  std::vector<double> log_first;
  std::vector<double> log_second;
  for (const std::int64_t n : n_grid) {
    const double nn = static_cast<double>(n);
    const double first = nn * capacity_bits(power_necessary(n, budget.delta));
    const double second = std::sqrt(nn * dispersion_bits2(power_sufficient(n, budget.delta))) * q_inv;
    log_n.push_back(std::log(nn));
    log_first.push_back(std::log(first));
    log_second.push_back(std::log(std::fabs(second)));
  }
  return {ols(log_n, log_first).slope, ols(log_n, log_second).slope};
}

}  // namespace covert_fbl
