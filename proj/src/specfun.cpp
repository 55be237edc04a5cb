#include "covert_fbl/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "covert_fbl/errors.hpp"

namespace covert_fbl::specfun {

namespace {

// ln Gamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2], valid for a >= 10 to ~1e-17.
double stirling_correction(double a) {
  const double r = 1.0 / a;
  const double r2 = r * r;
  return r * (1.0 / 12.0 +
              r2 * (-1.0 / 360.0 +
                    r2 * (1.0 / 1260.0 +
                          r2 * (-1.0 / 1680.0 +
                                r2 * (1.0 / 1188.0 +
                                      r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))))));
}

void check_gamma_args(GammaArgs args) {
  if (!std::isfinite(args.a) || !(args.a > 0.0)) {
    throw DomainError("incomplete gamma: shape a must be finite and > 0, got " +
                      std::to_string(args.a));
  }
  if (!std::isfinite(args.z) || args.z < 0.0) {
    throw DomainError("incomplete gamma: argument z must be finite and >= 0, got " +
                      std::to_string(args.z));
  }
}

// Sum_{k>=0} z^k / ((a+1)...(a+k)); P(a,z) = prefix * sum.
double lower_series(double a, double z) {
  double term = 1.0;
  double sum = 1.0;
  double denom = a;
  for (int k = 1; k <= kMaxIterations; ++k) {
    denom += 1.0;
    term *= z / denom;
    sum += term;
    if (term < sum * kStepTolerance) return sum;
  }
  throw ConvergenceError("lower incomplete gamma series did not converge for a=" +
                             std::to_string(a) + ", z=" + std::to_string(z),
                         kMaxIterations);
}

// Modified Lentz evaluation of the Legendre continued fraction for Gamma(a,z).
double upper_fraction(double a, double z) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = z + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kStepTolerance) return h;
  }
  throw ConvergenceError("upper incomplete gamma continued fraction did not converge for a=" +
                             std::to_string(a) + ", z=" + std::to_string(z),
                         kMaxIterations);
}

}  // namespace

double ln_gamma(double a) {
  if (!std::isfinite(a) || !(a > 0.0)) {
    throw DomainError("ln_gamma: argument must be finite and > 0, got " + std::to_string(a));
  }
  return boost::math::lgamma(a);
}

double log1pmx(double x) {
  if (!(x > -1.0)) throw DomainError("log1pmx: requires x > -1");
  if (std::fabs(x) < 0.25) {
    // -x^2/2 + x^3/3 - x^4/4 + ...
    double power = x * x;
    double sum = -power / 2.0;
    for (int k = 3; k < 80; ++k) {
      power *= x;
      const double term = power / k;
      sum += (k % 2 == 1) ? term : -term;
      if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum;
  }
  return std::log1p(x) - x;
}

double log_gamma_prefix(double a, double z) {
  check_gamma_args({a, z});
  if (z == 0.0) return -std::numeric_limits<double>::infinity();
  if (a >= 10.0) {
    const double x = (z - a) / a;
    return a * log1pmx(x) - 0.5 * std::log(2.0 * std::numbers::pi * a) - stirling_correction(a);
  }
  return a * std::log(z) - z - ln_gamma(a + 1.0);
}

RegGamma reg_gamma_pair(GammaArgs args) {
  check_gamma_args(args);
  const double a = args.a;
  const double z = args.z;
  if (z == 0.0) return {0.0, 1.0};

  const double log_prefix = log_gamma_prefix(a, z);
  if (z < a + 1.0) {
    const double p = std::exp(log_prefix + std::log(lower_series(a, z)));
    return {p, 1.0 - p};
  }
  const double q = std::exp(log_prefix + std::log(a) + std::log(upper_fraction(a, z)));
  return {1.0 - q, q};
}

double erfc(double x) {
  if (std::isnan(x)) throw DomainError("erfc: NaN argument");
  return std::erfc(x);
}

double gauss_q(double x) {
  if (std::isnan(x)) throw DomainError("gauss_q: NaN argument");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double gauss_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("gauss_q_inv: p must lie in (0, 1), got " + std::to_string(p));
  }
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace covert_fbl::specfun
