#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conilay::experiments {
struct Config;
}

namespace conilay::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;  // measured quantities and tolerances
};

struct TwoTermRow {
  double theta = 0.0;  // radians
  int n = 0;
  double mu = 0.0;
  double two_term_a = 0.0;
  double two_term_b = 0.0;
};

struct Report {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
  std::string variant_verdict;  // which two-term coefficient the data supports
  std::string specfun_digest;   // worst deviations against reference oracles
  std::vector<TwoTermRow> two_term_rows;  // discrimination data of criterion 5
};

/// Run the full verification suite. Progress lines (one per criterion) go
/// to `progress` when non-null.
Report run_all(int workers, std::ostream* progress);

void write_report_json(const Report& report, const std::string& path);

/// CLI entry: run, print one line per criterion, write report.json under
/// the config's output directory. Returns 0 on success, 2 on any failure.
int run_and_report(const experiments::Config& cfg);

}  // namespace conilay::verify
