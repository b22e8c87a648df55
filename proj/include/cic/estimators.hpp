#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "cic/data.hpp"
#include "cic/edist.hpp"

namespace cic {

// Principal-strata shares from period-1 mediator rates by treatment arm.
// p_m_given_d[d][m] = P(M=m | D=d, t=1). The complier share is pooled across
// the two identified expressions, ((p11-p10)+(p00-p01))/2, so that the
// decomposition and aggregation identities hold exactly in the estimates.
struct StrataShares {
  double p_a = 0.0;
  double p_c = 0.0;
  double p_n = 0.0;
  double p_m_given_d[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

// Requires both treatment arms present in period 1; throws WeakCompliers when
// p_c < min_pc. p_m_given_d entries may legitimately be 0 (one-sided designs).
StrataShares estimate_strata_shares(const CellPartition& part, double min_pc = 0.01);

struct QuantilePoint {
  double q = 0.0;
  double value = 0.0;
};

struct EffectEstimate {
  std::string tag;
  double average = std::numeric_limits<double>::quiet_NaN();
  std::vector<QuantilePoint> quantiles;
  bool available = true;
  std::string skip_reason;
};

// Stable report order: stratum effects first, then cell effects, then ATE.
const std::vector<std::string>& estimand_tags();

struct EffectSuite {
  StrataShares shares;
  std::vector<EffectEstimate> effects;  // estimand_tags() order
  std::vector<std::string> warnings;

  const EffectEstimate& at(std::string_view tag) const;
};

// Counterfactual period-1 maps, one per (d,m) cell, indexed d*2+m. A null
// entry marks the cell's map as unavailable (empty always-taker group).
struct TransformSet {
  std::array<std::function<double(double)>, 4> map;
};

// Quantile-quantile maps Q_dm(y) = F1^{-1}(F0(y)) built from each cell's two
// period distributions.
TransformSet cic_transforms(const CellPartition& part);

// Shared engine: every estimand is a fixed combination of observed period-1
// cells and partner-transformed period-0 cells; the transform set is the only
// difference between the quantile-quantile and mean-shift estimators.
EffectSuite estimate_with_transforms(const CellPartition& part, const TransformSet& transforms,
                                     const std::vector<double>& qgrid, double min_pc = 0.01);
EffectSuite estimate_with_transforms(const CellPartition& part, const TransformSet& transforms,
                                     const std::vector<double>& qgrid, const StrataShares& shares);

EffectSuite estimate_all(const CellPartition& part, const std::vector<double>& qgrid,
                         double min_pc = 0.01);

// Individual estimands. (d,m) names the conditioning cell; the counterfactual
// side always uses the opposite-treatment cell with the same mediator value.
EffectEstimate direct_effect_cell(const CellPartition& part, int d, int m,
                                  const std::vector<double>& qgrid);
EffectEstimate never_taker_effects(const CellPartition& part, const std::vector<double>& qgrid);
// Throws NoAlwaysTakers when p_a < min_pa.
EffectEstimate always_taker_effects(const CellPartition& part, const StrataShares& shares,
                                    const std::vector<double>& qgrid, double min_pa = 0.01);
struct ComplierDirectEffects {
  EffectEstimate under_m0;  // theta_c_0
  EffectEstimate under_m1;  // theta_c_1
};
ComplierDirectEffects complier_direct_effects(const CellPartition& part, const StrataShares& shares,
                                              const std::vector<double>& qgrid);
struct ComplierTotalIndirect {
  EffectEstimate total;        // Delta_c
  EffectEstimate indirect_m0;  // delta_c_0
  EffectEstimate indirect_m1;  // delta_c_1
};
ComplierTotalIndirect complier_total_and_indirect(const CellPartition& part,
                                                  const StrataShares& shares,
                                                  const std::vector<double>& qgrid);
EffectEstimate population_ate_qte(const CellPartition& part, const std::vector<double>& qgrid);

// Grid entries must lie strictly inside (0,1) and increase strictly.
void validate_quantile_grid(const std::vector<double>& qgrid);

}  // namespace cic
