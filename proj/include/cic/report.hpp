#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cic/bootstrap.hpp"
#include "cic/data.hpp"
#include "cic/diagnostics.hpp"
#include "cic/errors.hpp"
#include "cic/estimators.hpp"
#include "cic/simulation.hpp"

namespace cic {

// One reportable scalar of a suite: an effect's average (quantile_index -1)
// or one of its quantile points.
struct CoordinateRef {
  std::size_t effect_index = 0;
  int quantile_index = -1;
};

// Available coordinates in report order. Statistics built from this plan stay
// aligned with the point-estimate suite across bootstrap replicates.
std::vector<CoordinateRef> coordinate_plan(const EffectSuite& suite);

// Throws EmptyGroup when a planned coordinate is missing from `suite`; the
// bootstrap counts that replicate as failed.
std::vector<double> coordinate_values(const EffectSuite& suite,
                                      const std::vector<CoordinateRef>& plan);

struct EstimateReport {
  std::string estimator;  // "cic" or "did"
  StudyDesign design = StudyDesign::repeated_cross_section;
  std::size_t n_rows = 0;
  std::size_t n_clusters = 0;
  std::size_t dropped_rows = 0;
  bool one_sided = false;
  EffectSuite suite;
  std::vector<std::string> warnings;
  bool with_bootstrap = false;
  int bootstrap_replicates = 0;
  int bootstrap_failed = 0;
  std::vector<BootstrapResult> stats;  // coordinate_plan(suite) order
};

// All renderers are pure functions of their argument, so identical inputs
// produce byte-identical output.
std::string to_tsv(const EstimateReport& report);
std::string to_json(const EstimateReport& report);
std::string to_tsv(const std::vector<DiagnosticResult>& checks);
std::string to_json(const std::vector<DiagnosticResult>& checks);
std::string to_tsv(const MonteCarloReport& report);
std::string to_json(const MonteCarloReport& report);

// Single-line machine-parsable failure object with a stable "code" field.
std::string error_json(const Error& err);

const char* link_name(Link link);
const char* assignment_name(Assignment assignment);
const char* design_name(StudyDesign design);

}  // namespace cic
