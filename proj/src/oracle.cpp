#include "covert_fbl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "covert_fbl/errors.hpp"
#include "covert_fbl/parallel.hpp"

namespace covert_fbl::oracle {

namespace {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t chunk_index, int hypothesis) {
  return splitmix64(master ^ splitmix64(2 * chunk_index + static_cast<std::uint64_t>(hypothesis) + 1));
}

double adjusted_se(std::uint64_t k, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double p = (static_cast<double>(k) + 0.5) / (nn + 1.0);
  return std::sqrt(p * (1.0 - p) / nn);
}

// ln Gamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2].
double stirling_remainder(double a) {
  if (a < 10.0) return std::lgamma(a) - ((a - 0.5) * std::log(a) - a + 0.5 * std::log(2.0 * std::numbers::pi));
  const double r = 1.0 / a;
  const double r2 = r * r;
  return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
}

// Density of r = sqrt(X), X = s chi^2_n, written around its mode
// m = sqrt(s (n - 1)) as C exp((n - 1)[ln(1 + u) - u - u^2/2]), r = m (1 + u).
// Centering keeps the exponent O(1) near the peak, so the density carries
// full relative precision at n = 1e6. Uses std::lgamma and its own Stirling
// remainder, independent of the library's gamma kernels.
class RadialDensity {
 public:
  RadialDensity(std::int64_t n, double s) : n_(static_cast<double>(n)), s_(s) {
    const double a = 0.5 * n_;
    if (n == 1) {
      log_c_ = 0.5 * std::log(2.0 / (std::numbers::pi * s));
      return;
    }
    mode_ = std::sqrt(s * (n_ - 1.0));
    log_c_ = -0.5 * std::log(std::numbers::pi * s) + (a - 0.5) * std::log1p(-0.5 / a) + 0.5 - stirling_remainder(a);
  }

  double operator()(double r) const {
    if (n_ == 1.0) return std::exp(log_c_ - r * r / (2.0 * s_));
    if (r == 0.0) return 0.0;
    const double u = (r - mode_) / mode_;
    return std::exp(log_c_ + (n_ - 1.0) * (std::log1p(u) - u - 0.5 * u * u));
  }

 private:
  double n_;
  double s_;
  double mode_ = 0.0;
  double log_c_ = 0.0;
};

constexpr int kMaxDepth = 50;
constexpr long kMaxSubdivisions = 5'000'000;

template <class F>
class AdaptiveSimpson {
 public:
  explicit AdaptiveSimpson(const F& f) : f_(f) {}

  double integrate(double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f_(a);
    const double fm = f_(m);
    const double fb = f_(b);
    return refine(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 0);
  }

  long subdivisions() const { return count_; }

 private:
  double refine(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    if (++count_ > kMaxSubdivisions) {
      throw ConvergenceError("quadrature: subdivision budget exhausted after " + std::to_string(count_) + " subdivisions",
                             static_cast<int>(std::min<long>(count_, 1L << 30)));
    }
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f_(lm);
    const double frm = f_(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth >= 4 && std::fabs(err) <= 15.0 * tol) return left + right + err / 15.0;
    if (depth >= kMaxDepth) {
      throw ConvergenceError("quadrature: maximum depth reached after " + std::to_string(count_) + " subdivisions",
                             static_cast<int>(count_));
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  const F& f_;
  long count_ = 0;
};

// Splits [0, upper] at mode +- j sd of each radial density so that narrow
// peaks at large n are never stepped over.
std::vector<double> breakpoints(std::int64_t n, std::initializer_list<double> scales, double upper) {
  std::vector<double> pts{0.0, upper};
  const double nn = static_cast<double>(n);
  for (const double s : scales) {
    const double mode = std::sqrt(s * std::max(nn - 1.0, 0.0));
    const double sd = std::sqrt(0.5 * s);
    for (int j = -16; j <= 16; ++j) {
      const double x = mode + j * sd;
      if (x > 0.0 && x < upper) pts.push_back(x);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return b - a <= 1e-12 * std::max(1.0, b); }),
            pts.end());
  return pts;
}

template <class F>
double integrate_pieces(const F& f, const std::vector<double>& pts, double tol) {
  AdaptiveSimpson<F> quad(f);
  const double seg_tol = tol / static_cast<double>(pts.size());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += quad.integrate(pts[i], pts[i + 1], seg_tol);
  return sum;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void validate(const McConfig& cfg) {
  if (cfg.samples < kMinReportedSamples) {
    throw DomainError("mc_tvd: samples must be >= " + std::to_string(kMinReportedSamples));
  }
  if (cfg.chunk == 0) throw DomainError("mc_tvd: chunk must be > 0");
}

McEstimate mc_tvd(const ChannelPoint& cp, const McConfig& cfg, unsigned workers) {
  validate(cp);
  validate(cfg);
  const double shape = 0.5 * static_cast<double>(cp.n);
  const double threshold = cp.theta > 0.0 ? thresholds(cp).r_sq : static_cast<double>(cp.n) * cp.sigma_sq;
  const double scale[2] = {2.0 * cp.sigma_sq, 2.0 * cp.sigma_sq * (1.0 + cp.theta)};

  const std::uint64_t chunks = (cfg.samples + cfg.chunk - 1) / cfg.chunk;
  std::vector<std::uint64_t> counts(2 * chunks, 0);
  parallel_for(counts.size(), workers, [&](std::size_t task) {
    const std::uint64_t chunk_index = task / 2;
    const int hyp = static_cast<int>(task % 2);
    const std::uint64_t begin = chunk_index * cfg.chunk;
    const std::uint64_t size = std::min(cfg.chunk, cfg.samples - begin);
    std::mt19937_64 engine(stream_seed(cfg.seed, chunk_index, hyp));
    std::gamma_distribution<double> energy(shape, scale[hyp]);
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < size; ++i) {
      const double e = energy(engine);
      // H0: false alarm when e > R^2. H1: miss when e <= R^2.
      if (hyp == 0 ? e > threshold : e <= threshold) ++k;
    }
    counts[task] = k;
  });

  std::uint64_t fa = 0;
  std::uint64_t miss = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    fa += counts[2 * c];
    miss += counts[2 * c + 1];
  }
  const double nn = static_cast<double>(cfg.samples);
  McEstimate est{};
  est.alpha_hat = static_cast<double>(fa) / nn;
  est.beta_hat = static_cast<double>(miss) / nn;
  est.tvd_hat = 1.0 - est.alpha_hat - est.beta_hat;
  est.alpha_se = adjusted_se(fa, cfg.samples);
  est.beta_se = adjusted_se(miss, cfg.samples);
  est.std_err = std::hypot(est.alpha_se, est.beta_se);
  est.false_alarms = fa;
  est.misses = miss;
  est.samples = cfg.samples;
  return est;
}

double quad_tvd(const ChannelPoint& cp, double tol) {
  validate(cp);
  if (!(tol > 0.0)) throw DomainError("quad_tvd: tol must be > 0");
  if (cp.theta == 0.0) return 0.0;
  const double s0 = cp.sigma_sq;
  const double s1 = cp.sigma_sq * (1.0 + cp.theta);
  const RadialDensity h0(cp.n, s0);
  const RadialDensity h1(cp.n, s1);
  const auto diff = [&](double r) { return h0(r) - h1(r); };
  const double upper = std::sqrt(thresholds(cp).r_sq);
  return integrate_pieces(diff, breakpoints(cp.n, {s0, s1}, upper), 0.1 * tol);
}

double quad_chi2_cdf(std::int64_t n, double x, double tol) {
  if (n < 1) throw DomainError("quad_chi2_cdf: n must be >= 1");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("quad_chi2_cdf: x must be finite and >= 0");
  if (!(tol > 0.0)) throw DomainError("quad_chi2_cdf: tol must be > 0");
  if (x == 0.0) return 0.0;
  const RadialDensity h(n, 1.0);
  const double upper = std::sqrt(x);
  return integrate_pieces(h, breakpoints(n, {1.0}, upper), 0.1 * tol);
}

}  // namespace covert_fbl::oracle
