#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <thread>

#include "cohesive/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance gate: one line per criterion"};
  int criterion = 0;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string report;
  app.add_option("--criterion,-c", criterion, "run a single criterion (1-10); all when omitted")
      ->check(CLI::Range(0, cohesive::kCriterionCount));
  app.add_option("--threads,-j", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--report", report, "write a JSON report");
  CLI11_PARSE(app, argc, argv);

  std::vector<cohesive::CriterionResult> results;
  if (criterion > 0) {
    results.push_back(cohesive::run_criterion(criterion, threads));
    std::cout << cohesive::format_line(results.back()) << std::endl;
  } else {
    for (int id = 1; id <= cohesive::kCriterionCount; ++id) {
      results.push_back(cohesive::run_criterion(id, threads));
      std::cout << cohesive::format_line(results.back()) << std::endl;
    }
  }
  bool all = true;
  cohesive::Json j = cohesive::Json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    j.push_back(cohesive::to_json(r));
  }
  if (!report.empty()) std::ofstream(report) << j.dump(2) << "\n";
  return all ? 0 : 1;
}
