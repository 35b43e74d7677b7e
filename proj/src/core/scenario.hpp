#pragma once

#include "acceptance.hpp"
#include "json_io.hpp"

namespace qclab {

struct RunOptions {
  std::string out_dir = ".";
  int jobs = 1;
  bool write_reports = true;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> restarts_override;
  std::optional<int> max_iters_override;
  std::optional<double> tol_override;
};

struct TaskRecord {
  int index = -1;
  std::string op;
  std::string out_file;
  bool ok = true;           // all declared assertions passed
  Json result;              // the task's result object
  Json assertions;          // per-assertion outcomes
};

struct RunSummary {
  bool all_passed = true;
  std::vector<TaskRecord> tasks;
  Json to_json() const;
};

// Executes a scenario document: named channels and constraints, tasks in
// order, report files under out_dir, one machine-readable summary.
RunSummary run_scenario(const Json& scenario, const RunOptions& opts);
RunSummary run_scenario_file(const std::string& path, const RunOptions& opts);

// Operation names reachable as scenario tasks.
std::vector<std::string> task_names();

struct SelftestItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

// level "quick": fast pinned identities; "full": quick plus the acceptance
// criteria.
std::vector<SelftestItem> selftest(const std::string& level, int jobs = 1,
                                   std::ostream* progress = nullptr);
bool selftest_passed(const std::vector<SelftestItem>& items);

}  // namespace qclab
