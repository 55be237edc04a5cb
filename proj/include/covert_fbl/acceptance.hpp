#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace covert_fbl::acceptance {

/// FAST skips the 10^6-sample Monte Carlo criterion.
enum class Suite { Fast, Full };

struct Options {
  Suite suite = Suite::Full;
  unsigned workers = 1;
  std::uint64_t seed = 20240601;
  std::string csv_dir;              // figure CSVs are written here when non-empty
  std::ostream* progress = nullptr;  // one line per criterion as it finishes
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
};

struct Report {
  std::vector<CriterionResult> results;
  std::map<std::string, std::string> csv;  // file name -> bytes
  bool passed() const;
};

/// Runs criteria 1-10. Criterion 10 repeats 1-9 and every figure at one
/// worker and at several workers and compares reports and CSV bytes.
Report run(const Options& opts);

/// "criterion  N  PASS|FAIL|SKIP  title: detail (t s)"
std::string format_line(const CriterionResult& r);

Suite parse_suite(const std::string& text);

}  // namespace covert_fbl::acceptance
