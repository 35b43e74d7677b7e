#pragma once

#include <ostream>

#include "additivity.hpp"
#include "curves.hpp"

namespace qclab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

// The full acceptance suite; one result per criterion, printed to `progress`
// as they complete when a stream is given. Deterministic (pinned seeds).
std::vector<CriterionResult> run_acceptance(int jobs = 1,
                                            std::ostream* progress = nullptr);

bool acceptance_passed(const std::vector<CriterionResult>& results);

}  // namespace qclab
