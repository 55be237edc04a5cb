#include "covert_fbl/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "covert_fbl/errors.hpp"
#include "covert_fbl/parallel.hpp"
#include "covert_fbl/regression.hpp"

namespace covert_fbl::asymptotics {

namespace {

double evaluate(Quantity q, const ChannelPoint& cp) {
  switch (q) {
    case Quantity::Tvd: return tvd_exact(cp);
    case Quantity::OneMinusTvd: return one_minus_tvd(cp);
    case Quantity::KlRev: return kl_pair(cp).rev;
    case Quantity::KlFwd: return kl_pair(cp).fwd;
    case Quantity::HSq: return hellinger_sq(cp);
  }
  throw DomainError("unknown quantity");
}

std::vector<SweepPoint> upper_half(std::vector<SweepPoint> pts) {
  const std::size_t start = pts.size() / 2;
  return {pts.begin() + static_cast<std::ptrdiff_t>(start), pts.end()};
}

struct Profile {
  LinearFit fit;
  double p;
};

LinearFit stretched_fit(const std::vector<double>& log_n, const std::vector<double>& y, double p) {
  std::vector<double> x(log_n.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::exp(p * log_n[i]);
  return ols(x, y);
}

Profile profile_exponent(const std::vector<double>& log_n, const std::vector<double>& y) {
  constexpr double kLo = 0.02;
  constexpr double kHi = 1.5;
  constexpr double kStep = 0.005;
  double best_p = kLo;
  double best_rss = std::numeric_limits<double>::infinity();
  for (double p = kLo; p <= kHi + 1e-12; p += kStep) {
    const double rss = stretched_fit(log_n, y, p).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best_p = p;
    }
  }
  // Golden-section refinement inside the winning cell.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::max(kLo, best_p - kStep);
  double hi = std::min(kHi, best_p + kStep);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = stretched_fit(log_n, y, x1).rss;
  double f2 = stretched_fit(log_n, y, x2).rss;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = stretched_fit(log_n, y, x1).rss;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = stretched_fit(log_n, y, x2).rss;
    }
  }
  const double p = 0.5 * (lo + hi);
  return {stretched_fit(log_n, y, p), p};
}

struct Saturated {
  std::vector<double> log_n;
  std::vector<double> values;
};

Saturated usable_subhalf(const SweepSpec& spec, unsigned workers) {
  if (!(spec.tau < 0.5)) throw DomainError("fit_subhalf: requires tau < 0.5");
  if (spec.quantity != Quantity::OneMinusTvd) throw DomainError("fit_subhalf: quantity must be ONE_MINUS_TVD");
  Saturated s;
  for (const SweepPoint& pt : upper_half(sweep(spec, workers))) {
    if (!(pt.value >= kSaturationFloor)) continue;
    s.log_n.push_back(std::log(static_cast<double>(pt.n)));
    s.values.push_back(pt.value);
  }
  if (s.values.size() < kMinFitPoints) {
    throw FitError("fit_subhalf: only " + std::to_string(s.values.size()) +
                   " points above the saturation floor; need at least 4");
  }
  return s;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, std::size_t points) {
  if (lo < 1 || hi <= lo || points < 2) throw DomainError("log_grid: need 1 <= lo < hi and points >= 2");
  const double l0 = std::log(static_cast<double>(lo));
  const double l1 = std::log(static_cast<double>(hi));
  std::vector<std::int64_t> grid;
  grid.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    std::int64_t v = i + 1 == points ? hi : static_cast<std::int64_t>(std::llround(std::exp(l0 + t * (l1 - l0))));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

void validate(const SweepSpec& spec) {
  if (!(spec.tau > 0.0 && spec.tau < 1.0)) throw DomainError("sweep: tau must lie in (0, 1)");
  if (!(spec.c > 0.0) || !std::isfinite(spec.c)) throw DomainError("sweep: c must be finite and > 0");
  if (spec.n_grid.size() < 5) throw DomainError("sweep: need at least 5 grid points");
  for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
    if (spec.n_grid[i] < 1 || (i > 0 && spec.n_grid[i] <= spec.n_grid[i - 1])) {
      throw DomainError("sweep: grid must be strictly increasing positive blocklengths");
    }
  }
}

std::vector<SweepPoint> sweep(const SweepSpec& spec, unsigned workers) {
  validate(spec);
  std::vector<SweepPoint> out(spec.n_grid.size());
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const std::int64_t n = spec.n_grid[i];
    out[i] = {n, evaluate(spec.quantity, ChannelPoint::from_tau(n, spec.tau, spec.c))};
  });
  return out;
}

RateFit fit_subhalf(const SweepSpec& spec, unsigned workers) {
  const Saturated s = usable_subhalf(spec, workers);
  std::vector<double> y(s.values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log(s.values[i]);
  const Profile prof = profile_exponent(s.log_n, y);
  return {RateModel::StretchedExp, prof.p,        -prof.fit.slope, prof.fit.intercept, prof.fit.r_squared,
          y.size(),                kNaN,          kNaN,            true};
}

RateFit fit_subhalf_loglog(const SweepSpec& spec, unsigned workers) {
  const Saturated s = usable_subhalf(spec, workers);
  std::vector<double> y(s.values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log(-std::log(s.values[i]));
  const LinearFit fit = ols(s.log_n, y);
  return {RateModel::StretchedExp, fit.slope, std::exp(fit.intercept), 0.0, fit.r_squared, y.size(), kNaN, kNaN, true};
}

RateFit fit_superhalf(const SweepSpec& spec, unsigned workers) {
  if (!(spec.tau > 0.5)) throw DomainError("fit_superhalf: requires tau > 0.5");
  if (spec.quantity == Quantity::OneMinusTvd) throw DomainError("fit_superhalf: quantity must decay to 0");
  std::vector<double> log_n;
  std::vector<double> log_v;
  for (const SweepPoint& pt : upper_half(sweep(spec, workers))) {
    if (!(pt.value >= kUnderflowFloor)) continue;
    log_n.push_back(std::log(static_cast<double>(pt.n)));
    log_v.push_back(std::log(pt.value));
  }
  if (log_v.size() < kMinFitPoints) {
    throw FitError("fit_superhalf: only " + std::to_string(log_v.size()) + " points above the underflow floor");
  }
  const LinearFit fit = ols(log_n, log_v);
  const double e = 1.0 - 2.0 * spec.tau;
  const double lo = e - kSuperhalfMargin;
  const double hi = 0.5 * e + kSuperhalfMargin;
  return {RateModel::PowerLaw, fit.slope, std::exp(fit.intercept), fit.intercept, fit.r_squared, log_v.size(),
          lo,                  hi,        fit.slope >= lo && fit.slope <= hi};
}

std::vector<KlAsymptoteRow> kl_asymptote_check(const SweepSpec& spec, unsigned workers) {
  if (!(spec.tau >= 0.5)) throw DomainError("kl_asymptote_check: requires tau >= 0.5");
  SweepSpec kl = spec;
  kl.quantity = Quantity::KlRev;
  const std::vector<SweepPoint> pts = sweep(kl, workers);
  std::vector<KlAsymptoteRow> rows;
  rows.reserve(pts.size());
  for (const SweepPoint& pt : pts) {
    const double nn = static_cast<double>(pt.n);
    const double asym = spec.c * spec.c * std::pow(nn, 1.0 - 2.0 * spec.tau) / (4.0 * std::numbers::ln2);
    const double exact = pt.value / std::numbers::ln2;
    rows.push_back({pt.n, exact, asym, exact / asym});
  }
  return rows;
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::Tvd: return "tvd";
    case Quantity::OneMinusTvd: return "one_minus_tvd";
    case Quantity::KlRev: return "kl_rev";
    case Quantity::KlFwd: return "kl_fwd";
    case Quantity::HSq: return "h_sq";
  }
  return "unknown";
}

}  // namespace covert_fbl::asymptotics
