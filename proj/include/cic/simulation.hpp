#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cic/data.hpp"

namespace cic {

enum class Link { identity, exponential };
enum class Assignment { random, selective };

// Benchmark data-generating process. One row per unit (repeated cross-section):
// U ~ Unif(-1,1), V ~ N(0,1), T ~ Bernoulli(1/2); D ~ Bernoulli(1/2) under
// random assignment, D = 1{U+Q>0}, Q ~ N(0,1) under selective assignment;
// M = 1{D+U+V>0}; Y = Link((b0 + bd*D + bm*M + bdm*D*M)*T + U). Principal
// strata depend on U+V only: always-takers U+V>0, never-takers 1+U+V<=0,
// compliers in between; defiers cannot occur.
struct SimulationDesign {
  Link link = Link::identity;
  Assignment assignment = Assignment::random;
  std::size_t n = 4000;
  int reps = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  double b0 = 1.0, bd = 1.0, bm = 1.0, bdm = 1.0;
};

// Deterministic in (design.seed, rep_index), independent of thread count.
Dataset draw_dgp(const SimulationDesign& design, std::uint64_t rep_index);

// Brute-force potential-outcome means by stratum. theta_10_1 / theta_01_0 are
// the assignment-conditional cell versions; under random assignment they
// coincide with theta_n / theta_a.
struct TruthTable {
  double theta_n = 0, theta_a = 0, Delta_c = 0, theta_c_1 = 0, theta_c_0 = 0;
  double delta_c_1 = 0, delta_c_0 = 0;
  double theta_10_1 = 0, theta_01_0 = 0;
  double p_a = 0, p_c = 0, p_n = 0;
  std::size_t draws = 0;

  double truth_for(std::string_view tag) const;
};

TruthTable true_effects_oracle(const SimulationDesign& design, std::size_t draws);

struct MonteCarloRow {
  std::string tag;
  double bias = 0, sd = 0, rmse = 0, truth = 0, relr = 0;
  int n_failed = 0;
};

struct MonteCarloReport {
  SimulationDesign design;
  std::size_t oracle_draws = 0;
  TruthTable truths;
  std::vector<MonteCarloRow> cic;  // quantile-quantile estimator
  std::vector<MonteCarloRow> did;  // mean-shift comparator
};

// Runs both estimators on the same draws; sd is the population (1/R) standard
// deviation so rmse^2 = bias^2 + sd^2 holds exactly.
MonteCarloReport run_monte_carlo(const SimulationDesign& design,
                                 std::size_t oracle_draws = 1000000);

const std::vector<std::string>& monte_carlo_tags();

}  // namespace cic
