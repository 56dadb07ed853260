#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mdl {

/// One statistical invariant checked against its oracle.
struct ValidationCheck {
  std::string name;
  std::string oracle;  // what the statistic is compared against
  double statistic = 0.0;
  double tolerance = 0.0;
  long samples = 0;
  bool pass = false;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::vector<ValidationCheck> checks;

  bool all_pass() const;
};

/// Runs every Monte-Carlo-vs-formula invariant of the statistics layer:
/// covariance of sample-covariance quadratic forms (zero and nonzero mean),
/// signal-eigenvalue moments under both signal models, perturbation
/// coefficient covariances, bulk density integral and fit, largest-eigenvalue
/// moment approximation, and the variance-equivalence identity. Monte Carlo
/// gates are 4 standard errors from batch means unless stated otherwise in
/// the check's oracle note. `only` restricts the run to checks whose name
/// starts with one of the given prefixes (empty = all).
ValidationReport validate_suite(std::uint64_t seed, int workers = 1,
                                const std::vector<std::string>& only = {});

void write_report_text(std::ostream& os, const ValidationReport& report);
void write_report_json(const std::string& path, const ValidationReport& report);

}  // namespace mdl
