#include <doctest.h>

#include "approx.hpp"

#include <cmath>

#include "covert_fbl/channel_metrics.hpp"
#include "covert_fbl/errors.hpp"
#include "covert_fbl/oracle.hpp"

using namespace covert_fbl;
using namespace covert_fbl::oracle;

TEST_CASE("Monte Carlo at n=2, theta=1") {
  const McEstimate e = mc_tvd({2, 1.0, 1.0}, {1'000'000, 0x5eed, kDefaultChunk});
  CHECK(e.samples == 1'000'000);
  CHECK(e.std_err > 3e-4);
  CHECK(e.std_err < 1e-3);
  CHECK(std::fabs(e.tvd_hat - 0.25) <= 3.0 * e.std_err);
  CHECK(std::fabs(e.alpha_hat - 0.25) <= 4.0 * e.alpha_se);
  CHECK(std::fabs(e.beta_hat - 0.5) <= 4.0 * e.beta_se);
  CHECK(e.tvd_hat == rel(1.0 - e.alpha_hat - e.beta_hat).epsilon(1e-12));
}

TEST_CASE("Monte Carlo at theta=0 estimates zero") {
  const McEstimate e = mc_tvd({50, 0.0, 1.0}, {200'000, 7, kDefaultChunk});
  CHECK(e.std_err > 0.0);
  CHECK(std::fabs(e.tvd_hat) <= 3.0 * e.std_err);
}

TEST_CASE("Monte Carlo at n=1e4, tau=0.5") {
  const ChannelPoint cp = ChannelPoint::from_tau(10000, 0.5);
  const McEstimate e = mc_tvd(cp, {200'000, 99, kDefaultChunk});
  CHECK(std::fabs(e.tvd_hat - tvd_exact(cp)) <= 4.0 * e.std_err);
}

TEST_CASE("standard errors stay positive when a count is degenerate") {
  // Far into saturation: no false alarms and no misses.
  const McEstimate e = mc_tvd({1000, 5.0, 1.0}, {10'000, 3, kDefaultChunk});
  CHECK(e.false_alarms == 0);
  CHECK(e.misses == 0);
  CHECK(e.alpha_se > 0.0);
  CHECK(e.beta_se > 0.0);
}

TEST_CASE("Monte Carlo is bit-identical across worker counts") {
  const ChannelPoint cp{300, 0.08, 1.0};
  const McConfig cfg{300'000, 1234, 10'000};
  const McEstimate a = mc_tvd(cp, cfg, 1);
  for (const unsigned w : {2u, 3u, 8u}) {
    const McEstimate b = mc_tvd(cp, cfg, w);
    CHECK(a.false_alarms == b.false_alarms);
    CHECK(a.misses == b.misses);
    CHECK(a.tvd_hat == b.tvd_hat);
    CHECK(a.std_err == b.std_err);
  }
  const McEstimate other = mc_tvd(cp, {300'000, 1235, 10'000}, 1);
  CHECK((other.false_alarms != a.false_alarms || other.misses != a.misses));
}

TEST_CASE("quadrature oracle") {
  CHECK(std::fabs(quad_tvd({2, 1.0, 1.0}) - 0.25) <= 1e-12);
  CHECK(quad_tvd({40, 0.0, 1.0}) == 0.0);
  const ChannelPoint cp{1000, 0.0316, 1.0};
  CHECK(std::fabs(quad_tvd(cp) - tvd_exact(cp)) <= 1e-8);
  for (const std::int64_t n : {1, 3, 17, 250}) {
    for (const double theta : {0.01, 0.3, 2.0}) {
      const ChannelPoint p{n, theta, 1.0};
      CHECK(std::fabs(quad_tvd(p) - tvd_exact(p)) <= 1e-9);
    }
  }
}

TEST_CASE("chi-square quadrature") {
  CHECK(quad_chi2_cdf(2, 2.0 * std::log(2.0)) == rel(0.5).epsilon(1e-10));
  CHECK(quad_chi2_cdf(5, 0.0) == 0.0);
  CHECK_THROWS_AS(quad_chi2_cdf(0, 1.0), DomainError);
  CHECK_THROWS_AS(quad_chi2_cdf(3, -1.0), DomainError);
}

TEST_CASE("oracle validation") {
  CHECK_THROWS_AS(mc_tvd({2, 1.0, 1.0}, {kMinReportedSamples - 1, 1, kDefaultChunk}), DomainError);
  CHECK_THROWS_AS(mc_tvd({2, 1.0, 1.0}, {kMinReportedSamples, 1, 0}), DomainError);
  CHECK_THROWS_AS(mc_tvd({0, 1.0, 1.0}, {}), DomainError);
  CHECK_THROWS_AS(quad_tvd({2, 1.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("splitmix64") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(1) != splitmix64(2));
}
