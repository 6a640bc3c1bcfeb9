#ifndef CFL_ACCEPTANCE_HPP
#define CFL_ACCEPTANCE_HPP

#include <ostream>
#include <string>
#include <vector>

namespace cfl::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the numbered acceptance criteria; one pass/fail line per criterion on
// `progress` when given.
std::vector<CriterionResult> run_all(std::ostream* progress);

}  // namespace cfl::acceptance

#endif
