#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cohesive::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,           // usage error, failed validation, other errors
  kHypothesis = 2,        // model or target violates the hypotheses
  kNonConvergence = 3,    // numerical non-convergence
};

/// Runs `cohesive <subcommand> ...`; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// "lo:hi:step" -> lo, lo+step, ..., hi (the last node snaps to hi).
std::vector<double> parse_grid(const std::string& spec);

/// One CSV field with 17 significant digits.
std::string csv_number(double v);

}  // namespace cohesive::cli
