#pragma once

#include <string>
#include <vector>

#include "cic/bootstrap.hpp"
#include "cic/data.hpp"

namespace cic {

struct DiagnosticResult {
  std::string name;
  double estimate = 0.0;  // treated-minus-control difference
  double statistic = 0.0;
  double p_value = 1.0;
  double std_diff = 0.0;  // standardized difference, percent scale
  bool flagged = false;
  std::string note;
};

// Welch two-sample comparison of outcome means across treatment arms within
// one period. std_diff = 100*|m1-m0|/sqrt((v1+v0)/2), flagged above 20. Two
// degenerate groups compare exactly: equal means give p = 1, unequal p = 0.
DiagnosticResult balance_test(const Dataset& data, int period);

// Identifying implication: period-0 outcome means equal across arms. Same
// computation as period-0 balance, but flagged on rejection at 5%.
DiagnosticResult pretrend_implication_test(const Dataset& data);

// Bootstrap tests of the four cell-conditional direct effects being zero.
// Always-taker cells are left out when that group is absent or negligible.
std::vector<DiagnosticResult> exclusion_restriction_test(const Dataset& data,
                                                         const BootstrapConfig& cfg);

// Period-0 balance restricted to clusters observed in both periods; detects
// selective dropout. Panel designs only (NotPanel otherwise).
DiagnosticResult attrition_check(const Dataset& data);

std::vector<DiagnosticResult> run_all_diagnostics(const Dataset& data,
                                                  const BootstrapConfig& cfg);

}  // namespace cic
