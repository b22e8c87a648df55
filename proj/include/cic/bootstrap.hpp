#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cic/data.hpp"

namespace cic {

struct BootstrapConfig {
  int replicates = 1999;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  double max_failure_rate = 0.10;
};

struct BootstrapResult {
  double point = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double ci_lower = std::numeric_limits<double>::quiet_NaN();  // percentile 2.5%
  double ci_upper = std::numeric_limits<double>::quiet_NaN();  // percentile 97.5%
  int n_used = 0;
  int n_failed = 0;
};

// A statistic maps a dataset to a fixed-length coordinate vector; the whole
// pipeline (shares included) runs inside it, once per replicate.
using StatisticFn = std::function<std::vector<double>(const Dataset&)>;

struct BootstrapRun {
  std::vector<double> point;
  // Successful replicate draws in replicate order; draws[i][k] is coordinate k
  // of the i-th surviving replicate. Replicate order is seed-determined, so
  // this matrix is identical for every thread count.
  std::vector<std::vector<double>> draws;
  std::vector<BootstrapResult> results;
  int n_failed = 0;
};

// Resamples sampling units with replacement to their original count: clusters
// under the panel design, rows under repeated cross-sections. Replicates where
// the statistic throws a library error are dropped and counted; losing more
// than max_failure_rate of them raises TooManyFailedReplicates. p-values are
// the normal approximation 2*(1 - Phi(|point|/se)), with p = 1 when the draws
// are degenerate at a zero point estimate.
BootstrapRun cluster_bootstrap(const Dataset& data, const StatisticFn& statistic,
                               const BootstrapConfig& cfg);

BootstrapResult cluster_bootstrap_scalar(const Dataset& data,
                                         const std::function<double(const Dataset&)>& statistic,
                                         const BootstrapConfig& cfg);

// One resample of the sampling units; exposed for property tests.
Dataset resample_units(const Dataset& data, std::mt19937_64& gen);

struct SummaryRow {
  std::string label;
  double est = 0, se = 0, p_value = 0, ci_lower = 0, ci_upper = 0;
  int n_failed = 0;
};

std::vector<SummaryRow> summarize_bootstrap(const std::vector<std::string>& labels,
                                            const BootstrapRun& run);

double normal_two_sided_p(double point, double se);

}  // namespace cic
