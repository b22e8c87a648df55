#pragma once

#include <stdexcept>
#include <string>

namespace cic {

// Failure codes carried by every library exception. Validation codes describe
// input that is malformed regardless of the estimand; estimation codes describe
// data that cannot support a requested estimand.
enum class errc {
  missing_column,
  malformed_field,
  non_binary_code,
  empty_cell,
  inconsistent_panel,
  rank_deficient_design,
  not_panel,
  bad_config,
  q_out_of_range,
  weight_identity_violated,
  weak_compliers,
  no_always_takers,
  empty_group,
  too_many_failed_replicates,
};

constexpr const char* errc_name(errc c) {
  switch (c) {
    case errc::missing_column: return "MissingColumn";
    case errc::malformed_field: return "MalformedField";
    case errc::non_binary_code: return "NonBinaryCode";
    case errc::empty_cell: return "EmptyCell";
    case errc::inconsistent_panel: return "InconsistentPanel";
    case errc::rank_deficient_design: return "RankDeficientDesign";
    case errc::not_panel: return "NotPanel";
    case errc::bad_config: return "BadConfig";
    case errc::q_out_of_range: return "QOutOfRange";
    case errc::weight_identity_violated: return "WeightIdentityViolated";
    case errc::weak_compliers: return "WeakCompliers";
    case errc::no_always_takers: return "NoAlwaysTakers";
    case errc::empty_group: return "EmptyGroup";
    case errc::too_many_failed_replicates: return "TooManyFailedReplicates";
  }
  return "Unknown";
}

constexpr bool is_validation_error(errc c) {
  switch (c) {
    case errc::missing_column:
    case errc::malformed_field:
    case errc::non_binary_code:
    case errc::empty_cell:
    case errc::inconsistent_panel:
    case errc::rank_deficient_design:
    case errc::not_panel:
    case errc::bad_config:
    case errc::q_out_of_range:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace cic
