#pragma once
/*! \file
    \brief The acceptance suite, shared by the test binary and `validate`.
*/

#include <iosfwd>
#include <string>
#include <vector>

namespace flatbands {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Passed with a downgraded finding (criterion 7 only).
  bool warning = false;
  double seconds = 0.0;
  std::string detail;
};

struct AcceptanceOptions {
  /// Reduced radii for a fast smoke run.
  bool quick = false;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
  /// Empty means all of 1..9.
  std::vector<int> only;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// `PASS  3  name  (1.2 s)  detail`.
std::string format_line(const CriterionResult& r);

}  // namespace flatbands
