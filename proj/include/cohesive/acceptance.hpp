#pragma once

#include <string>
#include <vector>

#include "cohesive/config.hpp"

namespace cohesive {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // one-line summary of the worst measured quantity
  Json metrics;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

/// Runs acceptance criterion `id` (1-based). Errors are reported as failures.
CriterionResult run_criterion(int id, int threads = 1);
std::vector<CriterionResult> run_acceptance(int threads = 1);

Json to_json(const CriterionResult& r);
/// "[PASS] 3 name: detail (1.23 s)"
std::string format_line(const CriterionResult& r);

}  // namespace cohesive
