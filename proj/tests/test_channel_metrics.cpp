#include <doctest.h>

#include "approx.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "covert_fbl/channel_metrics.hpp"
#include "covert_fbl/errors.hpp"
#include "covert_fbl/oracle.hpp"
#include "covert_fbl/specfun.hpp"

using namespace covert_fbl;

namespace {

std::vector<double> log_space(double lo, double hi, int points) {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return v;
}

std::vector<std::int64_t> n_grid() {
  std::vector<std::int64_t> ns;
  for (const double x : log_space(2, 1e5, 25)) ns.push_back(static_cast<std::int64_t>(std::llround(x)));
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

}  // namespace

TEST_CASE("thresholds") {
  const Thresholds t = thresholds({2, 1.0, 1.0});
  CHECK(t.f == rel(2.0 * std::numbers::ln2).epsilon(1e-15));
  CHECK(t.g == rel(std::numbers::ln2).epsilon(1e-15));
  CHECK(t.r_sq == rel(2.0 * t.f).epsilon(1e-15));

  const Thresholds u = thresholds({100, 0.1, 1.0});
  CHECK(u.f == rel(52.42061).epsilon(1e-6));
  CHECK(u.g == rel(47.65510).epsilon(1e-6));

  const Thresholds tiny = thresholds({1000, 1e-12, 1.0});
  CHECK(tiny.f == rel(500.0).epsilon(1e-11));
  CHECK(tiny.g == rel(500.0).epsilon(1e-11));

  const Thresholds scaled = thresholds({10, 0.5, 3.0});
  CHECK(scaled.r_sq == rel(2.0 * 3.0 * scaled.f).epsilon(1e-15));
}

TEST_CASE("threshold identities and ordering") {
  for (const std::int64_t n : n_grid()) {
    for (const double theta : log_space(1e-4, 10, 15)) {
      const Thresholds t = thresholds({n, theta, 1.0});
      CHECK(t.f / t.g == rel(1.0 + theta).epsilon(1e-12));
      // f - g cancels, so its rounding error scales with f rather than f - g.
      CHECK(std::fabs((t.f - t.g) - theta * t.g) <= 1e-12 * t.f);
      CHECK(t.g < 0.5 * static_cast<double>(n));
      CHECK(0.5 * static_cast<double>(n) < t.f);
    }
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(tvd_exact({0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(tvd_exact({2, -0.1, 1.0}), DomainError);
  CHECK_THROWS_AS(tvd_exact({2, std::nan(""), 1.0}), DomainError);
  CHECK_THROWS_AS(tvd_exact({2, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ChannelPoint::from_tau(0, 0.5), DomainError);
}

TEST_CASE("closed-form TVD values") {
  CHECK(tvd_exact({2, 1.0, 1.0}) == rel(0.25).epsilon(1e-12));
  for (const std::int64_t n : {1, 2, 77, 100000}) CHECK(tvd_exact({n, 0.0, 1.0}) == 0.0);
  // Independent of the noise variance.
  CHECK(tvd_exact({40, 0.3, 7.0}) == rel(tvd_exact({40, 0.3, 1.0})).epsilon(1e-15));
}

TEST_CASE("TVD at n=1000, theta=1000^-1/2 is pinned by the quadrature oracle") {
  // Frozen from oracle::quad_tvd; the Monte Carlo estimate (1e6 samples) was 0.27199 +- 0.00068.
  const ChannelPoint cp{1000, std::pow(1000.0, -0.5), 1.0};
  const double v = tvd_exact(cp);
  CHECK(v == rel(0.272173330998537).epsilon(1e-12));
  const DivergenceReport d = bound_family(cp);
  CHECK(d.hellinger_lb <= v);
  CHECK(v <= d.hellinger_ub_improved);
}

TEST_CASE("identity chain tvd = (1 - alpha) - beta = P(n/2, f) - P(n/2, g)") {
  for (const std::int64_t n : n_grid()) {
    for (const double theta : log_space(1e-4, 10, 15)) {
      const ChannelPoint cp{n, theta, 1.0};
      const double tvd = tvd_exact(cp);
      const ErrorPair ab = alpha_beta(cp);
      const Thresholds t = thresholds(cp);
      const double a = 0.5 * static_cast<double>(n);
      const double direct = specfun::reg_gamma_pair({a, t.f}).p - specfun::reg_gamma_pair({a, t.g}).p;
      CHECK(std::fabs(tvd - ((1.0 - ab.alpha) - ab.beta)) <= 1e-12);
      CHECK(std::fabs(tvd - direct) <= 1e-12);
      CHECK(std::fabs(one_minus_tvd(cp) - (1.0 - tvd)) <= 1e-12);
    }
  }
}

TEST_CASE("one_minus_tvd resolves the saturated regime") {
  const ChannelPoint cp{100000, 0.2, 1.0};
  CHECK(tvd_exact(cp) == 1.0);
  const double r = one_minus_tvd(cp);
  const Thresholds t = thresholds(cp);
  const double ref = boost::math::gamma_q(50000.0, t.f) + boost::math::gamma_p(50000.0, t.g);
  CHECK(r > 0.0);
  CHECK(r == rel(ref).epsilon(1e-9));
}

TEST_CASE("TVD strictly increasing in theta and in n") {
  const std::vector<std::int64_t> ns = n_grid();
  const std::vector<double> thetas = log_space(1e-4, 10, 40);
  for (const std::int64_t n : ns) {
    double prev = 0.0;
    for (const double theta : thetas) {
      const ChannelPoint cp{n, theta, 1.0};
      const double v = tvd_exact(cp);
      if (v < 1.0) {
        CHECK(v > prev);
      }
      prev = v;
    }
  }
  for (const double theta : log_space(1e-4, 10, 15)) {
    double prev = 0.0;
    double prev_c = 1.0;
    for (const std::int64_t n : ns) {
      const ChannelPoint cp{n, theta, 1.0};
      const double v = tvd_exact(cp);
      const double c = one_minus_tvd(cp);
      if (v < 1.0) {
        CHECK(v > prev);
      } else if (c > 0.0) {
        CHECK(c < prev_c);
      }
      prev = v;
      prev_c = c;
    }
  }
}

TEST_CASE("Hellinger distance") {
  CHECK(hellinger_sq({2, 1.0, 1.0}) == rel(1.0 - 2.0 * std::numbers::sqrt2 / 3.0).epsilon(1e-14));
  CHECK(hellinger_sq({2, 1.0, 1.0}) == rel(0.057191).epsilon(1e-5));
  CHECK(hellinger_sq({4, 1.0, 1.0}) == rel(1.0 / 9.0).epsilon(1e-14));
  CHECK(hellinger_sq({9, 0.0, 1.0}) == 0.0);
}

TEST_CASE("KL divergences") {
  const KlPair kl = kl_pair({2, 1.0, 1.0});
  CHECK(kl.fwd == rel(1.0 - std::numbers::ln2).epsilon(1e-14));
  CHECK(kl.rev == rel(std::numbers::ln2 - 0.5).epsilon(1e-14));
  const KlPair kl4 = kl_pair({4, 1.0, 1.0});
  CHECK(kl4.fwd == rel(2.0 * kl.fwd).epsilon(1e-15));
  CHECK(kl4.rev == rel(2.0 * kl.rev).epsilon(1e-15));
  const KlPair zero = kl_pair({5, 0.0, 1.0});
  CHECK(zero.fwd == 0.0);
  CHECK(zero.rev == 0.0);
  CHECK(to_unit(std::numbers::ln2, InfoUnit::Bits) == rel(1.0).epsilon(1e-15));
  CHECK(to_unit(0.7, InfoUnit::Nats) == 0.7);
}

TEST_CASE("bound family at n=2, theta=1") {
  const DivergenceReport d = bound_family({2, 1.0, 1.0});
  CHECK(d.hellinger_ub_improved == rel(1.0 / 3.0).epsilon(1e-14));
  CHECK(d.pinsker_ub == rel(0.391697).epsilon(1e-5));
  // sqrt(1 - e^{-(1 - ln 2)}) = sqrt(1 - 2/e)
  CHECK(d.sason_exp_ub == rel(std::sqrt(1.0 - 2.0 / std::numbers::e)).epsilon(1e-14));
  CHECK(d.sason_exp_ub == rel(0.514044).epsilon(1e-5));
  CHECK(d.tvd == rel(0.25).epsilon(1e-12));

  const DivergenceReport z = bound_family({10, 0.0, 1.0});
  CHECK(z.tvd == 0.0);
  CHECK(z.h_sq == 0.0);
  CHECK(z.hellinger_lb == 0.0);
  CHECK(z.hellinger_ub_improved == 0.0);
  CHECK(z.hellinger_ub_sqrt2 == 0.0);
  CHECK(z.pinsker_ub == 0.0);
  CHECK(z.sason_exp_ub == 0.0);
}

TEST_CASE("bound sandwich on a log grid") {
  for (const std::int64_t n : n_grid()) {
    for (const double theta : log_space(1e-6, 10, 30)) {
      const DivergenceReport d = bound_family({n, theta, 1.0});
      CHECK(d.hellinger_lb <= d.tvd);
      CHECK(d.tvd <= d.hellinger_ub_improved);
      CHECK(d.hellinger_ub_improved <= d.hellinger_ub_sqrt2);
      CHECK(d.tvd <= d.pinsker_ub);
      CHECK(d.tvd <= d.sason_exp_ub);
    }
  }
}

TEST_CASE("a tightened Pinsker constant is caught by the sandwich grid") {
  std::size_t violations = 0;
  for (const std::int64_t n : n_grid()) {
    for (const double theta : log_space(1e-6, 10, 30)) {
      const DivergenceReport d = bound_family({n, theta, 1.0});
      const double tampered = std::sqrt(0.125 * d.kl_fwd);
      if (d.tvd > tampered) ++violations;
    }
  }
  CHECK(violations > 0);
}

TEST_CASE("alpha and beta") {
  const ErrorPair ab = alpha_beta({2, 1.0, 1.0});
  CHECK(ab.alpha == rel(0.25).epsilon(1e-12));
  CHECK(ab.beta == rel(0.5).epsilon(1e-12));
  const ErrorPair near = alpha_beta({100, 1e-9, 1.0});
  CHECK(near.alpha + near.beta == rel(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(alpha_beta({100, 0.0, 1.0}), DomainError);
}

TEST_CASE("alpha and beta agree with the Monte Carlo oracle at n=100, theta=0.1") {
  const ChannelPoint cp{100, 0.1, 1.0};
  const ErrorPair ab = alpha_beta(cp);
  const oracle::McEstimate mc = oracle::mc_tvd(cp, {1'000'000, 4242, oracle::kDefaultChunk});
  CHECK(std::fabs(mc.alpha_hat - ab.alpha) <= 4.0 * mc.alpha_se);
  CHECK(std::fabs(mc.beta_hat - ab.beta) <= 4.0 * mc.beta_se);
}
