#pragma once

#include "cic/estimators.hpp"

namespace cic {

// Common-trend counterfactual: period-0 outcomes shifted by the cell's mean
// change, L_dm(y) = y + (mean(Y|d,m,t=1) - mean(Y|d,m,t=0)).
double did_shift(const CellPartition& part, int d, int m);

TransformSet did_transforms(const CellPartition& part);

// Same estimand algebra as the quantile-quantile estimator with every Q_dm
// replaced by L_dm. Kept as a comparator; it is inconsistent whenever the
// outcome model is nonlinear in the unobservable.
EffectSuite did_effects(const CellPartition& part, const std::vector<double>& qgrid,
                        double min_pc = 0.01);

}  // namespace cic
