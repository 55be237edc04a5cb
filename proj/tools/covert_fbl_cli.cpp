// covert-fbl: command-line front end for the covert_fbl library.
//
// Every subcommand writes CSV (with a '#' provenance line) to stdout or --out.
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 acceptance failure.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "covert_fbl/acceptance.hpp"
#include "covert_fbl/asymptotics.hpp"
#include "covert_fbl/channel_metrics.hpp"
#include "covert_fbl/covert_design.hpp"
#include "covert_fbl/csv.hpp"
#include "covert_fbl/errors.hpp"
#include "covert_fbl/expansions.hpp"
#include "covert_fbl/figures.hpp"
#include "covert_fbl/oracle.hpp"
#include "covert_fbl/parallel.hpp"

namespace {

using namespace covert_fbl;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAcceptance = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::optional<std::int64_t> n;
  std::optional<double> theta;
  std::optional<double> tau;
  std::optional<double> c;
  std::optional<double> delta;
  std::optional<double> eps;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0x5eed;
  std::optional<int> terms;
  std::string branch = "transition";
  std::optional<double> tol;
  std::string out;
  std::string units = "bits";
  std::optional<std::string> grid;
  std::string suite = "full";
  std::string figure;
};

std::string version() {
#ifdef COVERT_FBL_VERSION
  return COVERT_FBL_VERSION;
#else
  return "0.0.0";
#endif
}

std::string header(const std::string& command) { return "covert-fbl " + version() + " " + command; }

void emit(const Table& table, const Args& args) {
  const std::string text = to_csv(table);
  if (args.out.empty()) {
    std::cout << text << std::flush;
  } else {
    write_text_file(args.out, text);
  }
}

template <typename T>
T require(const std::optional<T>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required flag ") + flag);
  return *v;
}

// --grid replaces --n; otherwise the single value of --n is used.
std::vector<std::int64_t> n_values(const Args& args) {
  if (args.grid) {
    if (args.n) throw UsageError("--n and --grid are mutually exclusive");
    return figures::integer_grid(figures::parse_grid(*args.grid));
  }
  return {require(args.n, "--n")};
}

ChannelPoint channel_point(const Args& args, std::int64_t n) {
  if (args.theta && args.tau) throw UsageError("--theta and --tau are mutually exclusive");
  if (args.theta) {
    if (args.c) throw UsageError("--c only applies together with --tau");
    return {n, *args.theta, 1.0};
  }
  if (args.tau) return ChannelPoint::from_tau(n, *args.tau, args.c.value_or(1.0));
  throw UsageError("one of --theta or --tau is required");
}

InfoUnit units(const Args& args) { return args.units == "nats" ? InfoUnit::Nats : InfoUnit::Bits; }

expansions::Branch branch(const Args& args) {
  if (args.branch == "tail_lower") return expansions::Branch::TailLower;
  if (args.branch == "tail_upper") return expansions::Branch::TailUpper;
  return expansions::Branch::Transition;
}

int cmd_tvd(const Args& args) {
  Table t{header("tvd"), {"n", "theta", "tvd", "alpha", "beta", "f", "g"}, {}};
  for (const std::int64_t n : n_values(args)) {
    const ChannelPoint cp = channel_point(args, n);
    const ErrorPair ab = alpha_beta(cp);
    const Thresholds th = thresholds(cp);
    t.rows.push_back({static_cast<double>(n), cp.theta, tvd_exact(cp), ab.alpha, ab.beta, th.f, th.g});
  }
  emit(t, args);
  return kExitOk;
}

int cmd_bounds(const Args& args) {
  Table t{header("bounds units=" + args.units),
          {"n", "theta", "tvd", "h_sq", "kl_fwd", "kl_rev", "pinsker_ub", "hellinger_lb", "hellinger_ub_sqrt2",
           "hellinger_ub_improved", "sason_exp_ub"},
          {}};
  const InfoUnit u = units(args);
  for (const std::int64_t n : n_values(args)) {
    const ChannelPoint cp = channel_point(args, n);
    const DivergenceReport d = bound_family(cp);
    t.rows.push_back({static_cast<double>(n), cp.theta, d.tvd, d.h_sq, to_unit(d.kl_fwd, u), to_unit(d.kl_rev, u),
                      d.pinsker_ub, d.hellinger_lb, d.hellinger_ub_sqrt2, d.hellinger_ub_improved, d.sason_exp_ub});
  }
  emit(t, args);
  return kExitOk;
}

int cmd_power(const Args& args) {
  const double delta = require(args.delta, "--delta");
  const double tol = args.tol.value_or(kDefaultPowerTol);
  Table t{header("power"), {"n", "delta", "theta_necessary", "theta_sufficient", "theta_exact", "tvd_at_exact"}, {}};
  for (const std::int64_t n : n_values(args)) {
    const PowerBracket b = power_bracket(n, delta, tol);
    t.rows.push_back({static_cast<double>(n), delta, b.theta_necessary, b.theta_sufficient, b.theta_exact,
                      tvd_exact({n, b.theta_exact, 1.0})});
  }
  emit(t, args);
  return kExitOk;
}

int cmd_throughput(const Args& args) {
  const CovertBudget budget{require(args.delta, "--delta"), require(args.eps, "--eps")};
  Table t{header("throughput"),
          {"n", "delta", "eps", "capacity_bits", "dispersion_bits2", "approx_bits", "upper_bits", "lower_bits"},
          {}};
  for (const std::int64_t n : n_values(args)) {
    const ThroughputReport r = throughput_bounds(n, budget);
    t.rows.push_back({static_cast<double>(n), budget.delta, budget.eps, r.capacity_bits, r.dispersion, r.log_m,
                      r.upper_bits, r.lower_bits});
  }
  emit(t, args);
  return kExitOk;
}

int cmd_expand(const Args& args) {
  expansions::ExpansionConfig cfg = expansions::default_config(branch(args));
  if (args.terms) {
    cfg.truncation = expansions::Truncation::FixedK;
    cfg.k_max = *args.terms;
  }
  Table t{header(std::string("expand branch=") + expansions::to_string(cfg.branch) +
                 " a_offset=" + expansions::to_string(cfg.a_offset) +
                 (args.terms ? " terms=" + std::to_string(*args.terms) : std::string(" truncation=optimal"))),
          {"n", "theta", "expansion", "exact", "rel_err", "k_used", "a", "regime_ok"},
          {}};
  for (const std::int64_t n : n_values(args)) {
    const ChannelPoint cp = channel_point(args, n);
    const expansions::ExpansionResult r = expansions::tvd_expansion(cp, cfg);
    if (!r.regime_ok) std::cerr << "warning: n=" << n << ": " << r.regime_note << '\n';
    t.rows.push_back({static_cast<double>(n), cp.theta, r.value, r.exact, r.rel_err_vs_exact,
                      static_cast<double>(r.k_used), r.a, r.regime_ok ? 1.0 : 0.0});
  }
  emit(t, args);
  return kExitOk;
}

int cmd_rates(const Args& args) {
  using namespace asymptotics;
  const double tau = require(args.tau, "--tau");
  const figures::GridSpec g = figures::parse_grid(args.grid.value_or("1000:100000:50:log"));
  SweepSpec spec{tau, args.c.value_or(1.0), figures::integer_grid(g)};
  RateFit fit{};
  if (tau < 0.5) {
    spec.quantity = Quantity::OneMinusTvd;
    fit = fit_subhalf(spec, default_workers());
  } else {
    spec.quantity = Quantity::Tvd;
    fit = fit_superhalf(spec, default_workers());
  }
  const char* model = fit.model == RateModel::PowerLaw ? "power_law" : "stretched_exp";
  Table t{header(std::string("rates quantity=") + to_string(spec.quantity) + " model=" + model),
          {"tau", "c", "p", "coef", "r_squared", "points_used", "band_lo", "band_hi", "in_band"},
          {{tau, spec.c, fit.p, fit.coef, fit.r_squared, static_cast<double>(fit.points_used), fit.band_lo,
            fit.band_hi, fit.in_band ? 1.0 : 0.0}}};
  emit(t, args);
  return kExitOk;
}

int cmd_mc(const Args& args) {
  const oracle::McConfig cfg{args.samples, args.seed, oracle::kDefaultChunk};
  const double tol = args.tol.value_or(oracle::kDefaultQuadTol);
  Table t{header("mc samples=" + std::to_string(args.samples) + " seed=" + std::to_string(args.seed)),
          {"n", "theta", "tvd_hat", "std_err", "alpha_hat", "alpha_se", "beta_hat", "beta_se", "tvd_exact",
           "tvd_quad"},
          {}};
  for (const std::int64_t n : n_values(args)) {
    const ChannelPoint cp = channel_point(args, n);
    const oracle::McEstimate e = oracle::mc_tvd(cp, cfg, default_workers());
    t.rows.push_back({static_cast<double>(n), cp.theta, e.tvd_hat, e.std_err, e.alpha_hat, e.alpha_se, e.beta_hat,
                      e.beta_se, tvd_exact(cp), oracle::quad_tvd(cp, tol)});
  }
  emit(t, args);
  return kExitOk;
}

int cmd_fig(const Args& args, const std::optional<std::string>& taus) {
  const auto id = figures::parse_figure_id(args.figure);
  if (!id) throw UsageError("unknown figure '" + args.figure + "' (expected FIG2..FIG8)");
  figures::Overrides ov;
  if (args.delta) ov["delta"] = format_double(*args.delta);
  if (args.eps) ov["eps"] = format_double(*args.eps);
  if (args.c) ov["c"] = format_double(*args.c);
  if (args.n) ov["n"] = std::to_string(*args.n);
  if (taus) ov["tau"] = *taus;
  if (args.grid) ov["grid"] = *args.grid;
  figures::FigureParams params = figures::default_params(*id);
  figures::apply_overrides(params, ov);
  figures::validate(params);
  emit(figures::run_figure(params, default_workers()), args);
  return kExitOk;
}

int cmd_accept(const Args& args) {
  acceptance::Options opts;
  opts.suite = acceptance::parse_suite(args.suite);
  opts.workers = default_workers();
  opts.seed = args.seed;
  opts.csv_dir = args.out;
  opts.progress = &std::cout;
  const acceptance::Report report = acceptance::run(opts);
  std::cout << (report.passed() ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << '\n';
  return report.passed() ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact total variation distance for finite-blocklength AWGN covert communication"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Args args;
  std::optional<std::string> taus;

  const auto add_point = [&](CLI::App* sub) {
    sub->add_option("--n", args.n, "blocklength n (positive integer)");
    sub->add_option("--theta", args.theta, "power-to-noise ratio theta > 0");
    sub->add_option("--tau", args.tau, "set theta = c n^-tau");
    sub->add_option("--c", args.c, "scale c in theta = c n^-tau (default 1)");
    sub->add_option("--grid", args.grid, "n grid min:max:points[:log|lin], replaces --n");
  };
  const auto add_out = [&](CLI::App* sub, const char* help) { sub->add_option("--out", args.out, help); };

  auto* tvd = app.add_subcommand("tvd", "exact TVD with false-alarm and missed-detection probabilities");
  add_point(tvd);
  add_out(tvd, "CSV output path (default stdout)");

  auto* bounds = app.add_subcommand("bounds", "TVD with Hellinger, KL, Pinsker and Sason bounds");
  add_point(bounds);
  bounds->add_option("--units", args.units, "unit of the KL columns")->check(CLI::IsMember({"bits", "nats"}));
  add_out(bounds, "CSV output path (default stdout)");

  auto* power = app.add_subcommand("power", "necessary, sufficient and exact power for a TVD budget");
  power->add_option("--n", args.n, "blocklength n");
  power->add_option("--grid", args.grid, "n grid min:max:points[:log|lin], replaces --n");
  power->add_option("--delta", args.delta, "TVD budget delta in (0,1)");
  power->add_option("--tol", args.tol, "relative tolerance of the exact inversion");
  add_out(power, "CSV output path (default stdout)");

  auto* thr = app.add_subcommand("throughput", "throughput bounds and normal approximation in bits");
  thr->add_option("--n", args.n, "blocklength n");
  thr->add_option("--grid", args.grid, "n grid min:max:points[:log|lin], replaces --n");
  thr->add_option("--delta", args.delta, "TVD budget delta in (0,1)");
  thr->add_option("--eps", args.eps, "decoding error eps in (0,1)");
  add_out(thr, "CSV output path (default stdout)");

  auto* expand = app.add_subcommand("expand", "truncated series approximation of the TVD");
  add_point(expand);
  expand->add_option("--branch", args.branch, "expansion branch")
      ->check(CLI::IsMember({"tail_lower", "tail_upper", "transition"}));
  expand->add_option("--terms", args.terms, "fixed truncation order K (default: optimal truncation)")
      ->check(CLI::Range(0, expansions::kMaxTerms));
  add_out(expand, "CSV output path (default stdout)");

  auto* rates = app.add_subcommand("rates", "fit the convergence rate of TVD along theta = c n^-tau");
  rates->add_option("--tau", args.tau, "exponent tau (tau < 0.5: 1 - TVD fit, tau > 0.5: TVD slope)");
  rates->add_option("--c", args.c, "scale c (default 1)");
  rates->add_option("--grid", args.grid, "n grid (default 1000:100000:50:log)");
  add_out(rates, "CSV output path (default stdout)");

  auto* mc = app.add_subcommand("mc", "Monte Carlo and quadrature estimates of the TVD");
  add_point(mc);
  mc->add_option("--samples", args.samples, "trials per hypothesis")->check(CLI::PositiveNumber);
  mc->add_option("--seed", args.seed, "random seed");
  mc->add_option("--tol", args.tol, "quadrature tolerance");
  add_out(mc, "CSV output path (default stdout)");

  auto* fig = app.add_subcommand("fig", "reproduce a figure's data as CSV");
  fig->add_option("id", args.figure, "FIG2..FIG8")->required();
  fig->add_option("--delta", args.delta, "override delta");
  fig->add_option("--eps", args.eps, "override eps");
  fig->add_option("--c", args.c, "override c");
  fig->add_option("--n", args.n, "override n");
  fig->add_option("--tau", taus, "override tau list, comma separated");
  fig->add_option("--grid", args.grid, "override grid min:max:points[:log|lin]");
  add_out(fig, "CSV output path (default stdout)");

  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--suite", args.suite, "fast or full")->check(CLI::IsMember({"fast", "full"}, CLI::ignore_case));
  accept->add_option("--seed", args.seed, "base seed for the Monte Carlo criterion");
  accept->add_option("--out", args.out, "directory for the figure CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (accept->parsed() && accept->count("--seed") == 0) args.seed = acceptance::Options{}.seed;

  try {
    if (tvd->parsed()) return cmd_tvd(args);
    if (bounds->parsed()) return cmd_bounds(args);
    if (power->parsed()) return cmd_power(args);
    if (thr->parsed()) return cmd_throughput(args);
    if (expand->parsed()) return cmd_expand(args);
    if (rates->parsed()) return cmd_rates(args);
    if (mc->parsed()) return cmd_mc(args);
    if (fig->parsed()) return cmd_fig(args, taus);
    if (accept->parsed()) return cmd_accept(args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
