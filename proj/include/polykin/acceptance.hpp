#pragma once

#include <string>
#include <vector>

#include "polykin/config.hpp"

#include "json.hpp"

namespace polykin {

// One verification check.  margin is the worst normalized tolerance fraction
// observed (< 1 passes); detail records the measured quantities behind it.
struct CheckResult {
  int id = 0;
  std::string name;
  std::string status;  // PASS | FAIL | SKIP
  double margin = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CheckResult> checks;
  bool all_ok() const;
};

nlohmann::json report_json(const AcceptanceReport& rep);
std::string format_check_line(const CheckResult& c);

// Runs the verification suite.  `ids` empty runs all twelve checks; a
// nonempty list restricts to those ids (used by fast targeted tests).
// Checks that exercise the inelastic source are skipped when the configured
// theta is zero.  Exceptions inside a check are caught and reported as FAIL.
AcceptanceReport run_acceptance(const RunConfig& cfg,
                                const std::vector<int>& ids = {});

}  // namespace polykin
