#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cic/data.hpp"

namespace cic {

struct ColumnSpec {
  std::string outcome = "y";
  std::string treatment = "d";
  std::string mediator = "m";
  std::string time = "t";
  std::string cluster = "id";  // empty: every row is its own cluster
  std::vector<std::string> covariates;
};

// CSV with a header row. Rows missing y/d/m/t/covariate values (empty, NA,
// NaN) are dropped and counted in Dataset::dropped_rows; anything else that
// fails to parse is a MalformedField error naming the line. d/m/t must code
// exactly 0 or 1. Cell-occupancy and panel invariants are checked before
// returning.
Dataset load_csv(std::istream& in, const ColumnSpec& columns, StudyDesign design);
Dataset load_csv_file(const std::string& path, const ColumnSpec& columns, StudyDesign design);

}  // namespace cic
