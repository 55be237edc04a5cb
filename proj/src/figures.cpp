#include "covert_fbl/figures.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "covert_fbl/asymptotics.hpp"
#include "covert_fbl/channel_metrics.hpp"
#include "covert_fbl/covert_design.hpp"
#include "covert_fbl/errors.hpp"
#include "covert_fbl/expansions.hpp"
#include "covert_fbl/parallel.hpp"

#ifndef COVERT_FBL_VERSION
#define COVERT_FBL_VERSION "0.0.0"
#endif

namespace covert_fbl::figures {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxPoints = 100000;

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw DomainError("override " + std::string(key) + ": '" + std::string(text) + "' is not a finite number");
  }
  return v;
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  const double v = parse_real(key, text);
  if (v != std::floor(v) || std::fabs(v) > 9e15) {
    throw DomainError("override " + std::string(key) + ": '" + std::string(text) + "' is not an integer");
  }
  return static_cast<std::int64_t>(v);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

bool grid_over_delta(FigureId id) { return id == FigureId::Fig5; }

std::set<std::string> allowed_keys(FigureId id) {
  std::set<std::string> keys{"grid", "points", "spacing"};
  if (!grid_over_delta(id)) keys.insert({"n_min", "n_max"});
  switch (id) {
    case FigureId::Fig2:
    case FigureId::Fig3: keys.insert("delta"); break;
    case FigureId::Fig4: keys.insert({"delta", "eps"}); break;
    case FigureId::Fig5: keys.insert("n"); break;
    case FigureId::Fig6:
    case FigureId::Fig7:
    case FigureId::Fig8: keys.insert({"tau", "c"}); break;
  }
  return keys;
}

std::string join_taus(const std::vector<double>& taus) {
  std::string s;
  for (std::size_t i = 0; i < taus.size(); ++i) s += (i ? "," : "") + format_double(taus[i]);
  return s;
}

std::string grid_text(const GridSpec& g) {
  return format_double(g.min) + ":" + format_double(g.max) + ":" + std::to_string(g.points) + ":" +
         (g.log ? "log" : "lin");
}

std::string provenance(const FigureParams& p) {
  std::string s = std::string("covert-fbl ") + COVERT_FBL_VERSION + " figure=" + to_string(p.id);
  switch (p.id) {
    case FigureId::Fig2:
    case FigureId::Fig3: s += " delta=" + format_double(p.delta); break;
    case FigureId::Fig4: s += " delta=" + format_double(p.delta) + " eps=" + format_double(p.eps); break;
    case FigureId::Fig5: s += " n=" + std::to_string(p.n); break;
    default: s += " c=" + format_double(p.c) + " tau=" + join_taus(p.taus); break;
  }
  s += std::string(grid_over_delta(p.id) ? " delta_grid=" : " n_grid=") + grid_text(p.grid);
  return s;
}

double expansion_or_nan(const ChannelPoint& cp, expansions::Branch branch) {
  try {
    return expansions::tvd_expansion(cp, expansions::default_config(branch)).value;
  } catch (const DomainError&) {
    return kNaN;
  } catch (const NumericalError&) {
    return kNaN;
  }
}

std::vector<double> power_row(std::int64_t n, double delta) {
  const PowerBracket b = power_bracket(n, delta);
  return {static_cast<double>(n), b.theta_necessary, b.theta_sufficient, b.theta_exact};
}

}  // namespace

FigureParams default_params(FigureId id) {
  FigureParams p;
  p.id = id;
  switch (id) {
    case FigureId::Fig2: p.delta = 0.1; p.grid = {100, 1e4, 50, true}; break;
    case FigureId::Fig3: p.delta = 0.01; p.grid = {100, 1e4, 50, true}; break;
    case FigureId::Fig4: p.delta = 0.1; p.eps = 0.1; p.grid = {500, 1e5, 50, true}; break;
    case FigureId::Fig5: p.n = 2000; p.grid = {1e-3, 0.5, 50, true}; break;
    case FigureId::Fig6: p.taus = {0.3, 0.4, 0.5, 0.6, 0.7}; p.grid = {1e3, 1e6, 50, true}; break;
    case FigureId::Fig7: p.taus = {0.1, 0.25, 0.4}; p.grid = {100, 1e6, 50, true}; break;
    case FigureId::Fig8: p.taus = {0.6, 0.75, 0.9}; p.grid = {100, 1e6, 50, true}; break;
  }
  return p;
}

GridSpec parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 && parts.size() != 4) throw DomainError("grid must be min:max:points[:log|lin]");
  GridSpec g{parse_real("grid", parts[0]), parse_real("grid", parts[1]), 0, true};
  const std::int64_t pts = parse_int("grid", parts[2]);
  if (pts < 2 || pts > static_cast<std::int64_t>(kMaxPoints)) throw DomainError("grid: points must lie in [2, 100000]");
  g.points = static_cast<std::size_t>(pts);
  if (!(g.max > g.min)) throw DomainError("grid: need min < max");
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      g.log = true;
    } else if (parts[3] == "lin") {
      g.log = false;
    } else {
      throw DomainError("grid: spacing must be 'log' or 'lin'");
    }
  }
  if (g.log && !(g.min > 0.0)) throw DomainError("grid: log spacing needs min > 0");
  return g;
}

std::vector<double> real_grid(const GridSpec& g) {
  if (!(g.max > g.min) || g.points < 2) throw DomainError("grid: need min < max and at least 2 points");
  if (g.log && !(g.min > 0.0)) throw DomainError("grid: log spacing needs min > 0");
  std::vector<double> v(g.points);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(g.points - 1);
    v[i] = g.log ? std::exp(std::log(g.min) + t * (std::log(g.max) - std::log(g.min))) : g.min + t * (g.max - g.min);
  }
  v.front() = g.min;
  v.back() = g.max;
  return v;
}

std::vector<std::int64_t> integer_grid(const GridSpec& g) {
  std::vector<std::int64_t> out;
  for (const double x : real_grid(g)) {
    const auto v = static_cast<std::int64_t>(std::llround(x));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

void validate(const FigureParams& p) {
  const auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (p.grid.points < 2 || p.grid.points > kMaxPoints) throw DomainError("grid: points must lie in [2, 100000]");
  if (!(p.grid.max > p.grid.min)) throw DomainError("grid: need min < max");
  if (grid_over_delta(p.id)) {
    if (!in_unit(p.grid.min) || !in_unit(p.grid.max)) throw DomainError("delta grid must lie inside (0, 1)");
    if (p.n < 1) throw DomainError("n must be >= 1");
  } else {
    if (p.grid.min < 1.0 || p.grid.max > 1e9) throw DomainError("n grid must lie inside [1, 1e9]");
  }
  if (!in_unit(p.delta)) throw DomainError("delta must lie in (0, 1)");
  if (!in_unit(p.eps)) throw DomainError("eps must lie in (0, 1)");
  if (!(p.c > 0.0) || !std::isfinite(p.c)) throw DomainError("c must be finite and > 0");
  for (const double tau : p.taus) {
    if (!in_unit(tau)) throw DomainError("tau values must lie in (0, 1)");
    if (p.id == FigureId::Fig7 && !(tau < 0.5)) throw DomainError("FIG7 plots tau < 1/2");
    if (p.id == FigureId::Fig8 && !(tau > 0.5)) throw DomainError("FIG8 plots tau > 1/2");
  }
  const bool tau_figure = p.id == FigureId::Fig6 || p.id == FigureId::Fig7 || p.id == FigureId::Fig8;
  if (tau_figure && p.taus.empty()) throw DomainError("tau list must not be empty");
}

void apply_overrides(FigureParams& p, const Overrides& overrides) {
  const std::set<std::string> allowed = allowed_keys(p.id);
  FigureParams next = p;
  for (const auto& [key, value] : overrides) {
    if (!allowed.contains(key)) {
      throw DomainError("override '" + key + "' is not recognised for " + to_string(p.id));
    }
    if (key == "delta") {
      next.delta = parse_real(key, value);
    } else if (key == "eps") {
      next.eps = parse_real(key, value);
    } else if (key == "c") {
      next.c = parse_real(key, value);
    } else if (key == "n") {
      next.n = parse_int(key, value);
    } else if (key == "tau") {
      next.taus.clear();
      for (const auto part : split(value, ',')) next.taus.push_back(parse_real(key, part));
    } else if (key == "grid") {
      next.grid = parse_grid(value);
    } else if (key == "n_min") {
      next.grid.min = static_cast<double>(parse_int(key, value));
    } else if (key == "n_max") {
      next.grid.max = static_cast<double>(parse_int(key, value));
    } else if (key == "points") {
      const std::int64_t pts = parse_int(key, value);
      if (pts < 2) throw DomainError("points must be >= 2");
      next.grid.points = static_cast<std::size_t>(pts);
    } else if (key == "spacing") {
      if (value != "log" && value != "lin") throw DomainError("spacing must be 'log' or 'lin'");
      next.grid.log = value == "log";
    }
  }
  validate(next);
  p = next;
}

Table run_figure(const FigureParams& p, unsigned workers) {
  validate(p);
  Table t;
  t.provenance = provenance(p);

  if (grid_over_delta(p.id)) {
    const std::vector<double> deltas = real_grid(p.grid);
    t.columns = {"delta", "theta_necessary", "theta_sufficient", "theta_exact"};
    t.rows.resize(deltas.size());
    parallel_for(deltas.size(), workers, [&](std::size_t i) {
      std::vector<double> row = power_row(p.n, deltas[i]);
      row[0] = deltas[i];
      t.rows[i] = std::move(row);
    });
    return t;
  }

  const std::vector<std::int64_t> ns = integer_grid(p.grid);
  t.rows.resize(ns.size());
  switch (p.id) {
    case FigureId::Fig2:
    case FigureId::Fig3:
      t.columns = {"n", "theta_necessary", "theta_sufficient", "theta_exact"};
      parallel_for(ns.size(), workers, [&](std::size_t i) { t.rows[i] = power_row(ns[i], p.delta); });
      break;
    case FigureId::Fig4:
      t.columns = {"n", "upper_bits", "lower_bits", "approx_bits", "sqrt_n"};
      parallel_for(ns.size(), workers, [&](std::size_t i) {
        const ThroughputReport r = throughput_bounds(ns[i], {p.delta, p.eps});
        const double nn = static_cast<double>(ns[i]);
        t.rows[i] = {nn, r.upper_bits, r.lower_bits, r.log_m, std::sqrt(nn)};
      });
      break;
    case FigureId::Fig6:
      t.columns = {"n"};
      for (const double tau : p.taus) t.columns.push_back("tvd@" + format_double(tau));
      parallel_for(ns.size(), workers, [&](std::size_t i) {
        std::vector<double> row{static_cast<double>(ns[i])};
        for (const double tau : p.taus) row.push_back(tvd_exact(ChannelPoint::from_tau(ns[i], tau, p.c)));
        t.rows[i] = std::move(row);
      });
      break;
    case FigureId::Fig7:
    case FigureId::Fig8: {
      const bool sub = p.id == FigureId::Fig7;
      const char* second = sub ? "h_sq@" : "kl_bound@";
      t.columns = {"n"};
      for (const double tau : p.taus) {
        const std::string tag = format_double(tau);
        t.columns.insert(t.columns.end(),
                         {"tvd@" + tag, second + tag, "hellinger_ub@" + tag, "expansion@" + tag});
      }
      const auto branch = sub ? expansions::Branch::TailLower : expansions::Branch::Transition;
      parallel_for(ns.size(), workers, [&](std::size_t i) {
        std::vector<double> row{static_cast<double>(ns[i])};
        for (const double tau : p.taus) {
          const ChannelPoint cp = ChannelPoint::from_tau(ns[i], tau, p.c);
          const DivergenceReport d = bound_family(cp);
          row.insert(row.end(), {d.tvd, sub ? d.h_sq : d.pinsker_ub, d.hellinger_ub_improved,
                                 expansion_or_nan(cp, branch)});
        }
        t.rows[i] = std::move(row);
      });
      break;
    }
    case FigureId::Fig5: break;
  }
  return t;
}

std::optional<FigureId> parse_figure_id(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s.rfind("fig", 0) == 0) s = s.substr(3);
  if (s.size() == 1 && s[0] >= '2' && s[0] <= '8') return kAllFigures[s[0] - '2'];
  return std::nullopt;
}

const char* to_string(FigureId id) {
  static constexpr const char* kNames[] = {"FIG2", "FIG3", "FIG4", "FIG5", "FIG6", "FIG7", "FIG8"};
  return kNames[static_cast<int>(id)];
}

}  // namespace covert_fbl::figures
