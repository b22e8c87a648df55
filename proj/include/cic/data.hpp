#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cic/errors.hpp"

namespace cic {

// Panel: clusters are units observed in (up to) both periods with a fixed
// (d,m); bootstrap resamples clusters. Repeated cross-section: rows are
// independent draws; bootstrap resamples rows.
enum class StudyDesign { panel, repeated_cross_section };

struct Observation {
  std::int32_t cluster = 0;  // index into Dataset::cluster_labels
  double y = 0.0;
  std::uint8_t d = 0;
  std::uint8_t m = 0;
  std::uint8_t t = 0;
};

struct Dataset {
  std::vector<Observation> rows;
  // Column-major covariates; every column has rows.size() entries.
  std::vector<std::vector<double>> covariate_cols;
  std::vector<std::string> covariate_names;
  std::vector<std::string> cluster_labels;
  StudyDesign design = StudyDesign::repeated_cross_section;
  std::size_t dropped_rows = 0;  // rows discarded for missing y/d/m/t/covariates

  std::size_t n_clusters() const { return cluster_labels.size(); }
};

// Outcomes split by (d,m,t), each cell sorted ascending. The always-taker
// group (0,1) may be empty as a pair, which marks a one-sided compliance
// design; any other empty cell is an EmptyCell error.
struct CellPartition {
  std::array<std::vector<double>, 8> cells;
  bool one_sided = false;
  std::vector<std::string> warnings;

  static constexpr std::size_t index(int d, int m, int t) {
    return static_cast<std::size_t>(d * 4 + m * 2 + t);
  }
  const std::vector<double>& cell(int d, int m, int t) const { return cells[index(d, m, t)]; }
  std::size_t count(int d, int m, int t) const { return cell(d, m, t).size(); }
};

CellPartition partition_cells(const Dataset& data);

// Checks the panel invariant: within a cluster, (d,m) is constant across
// periods. No-op for repeated cross-sections.
void validate_design(const Dataset& data);

// Replaces y with grand_mean(y) + residual from one pooled OLS of y on the
// covariates with intercept. Throws RankDeficientDesign when the design matrix
// loses rank. Returns the input untouched when there are no covariates.
Dataset residualize_covariates(const Dataset& data);

}  // namespace cic
