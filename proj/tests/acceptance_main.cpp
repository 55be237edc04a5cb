// Acceptance runner: one PASS/FAIL/SKIP line per criterion, exit status 0 iff
// every criterion passes.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "covert_fbl/acceptance.hpp"
#include "covert_fbl/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"covert_fbl acceptance suite"};
  std::string suite = "full";
  std::string out;
  unsigned workers = covert_fbl::default_workers();
  covert_fbl::acceptance::Options opts;
  app.add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}, CLI::ignore_case));
  app.add_option("--out", out, "directory for the figure CSVs");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "base seed for the Monte Carlo criterion");
  CLI11_PARSE(app, argc, argv);

  opts.suite = covert_fbl::acceptance::parse_suite(suite);
  opts.workers = workers;
  opts.csv_dir = out;
  opts.progress = &std::cout;
  const auto report = covert_fbl::acceptance::run(opts);
  std::size_t failed = 0;
  for (const auto& r : report.results) failed += r.passed ? 0 : 1;
  std::cout << (failed == 0 ? "ALL CRITERIA PASSED" : std::to_string(failed) + " CRITERIA FAILED") << '\n';
  return failed == 0 ? 0 : 1;
}
