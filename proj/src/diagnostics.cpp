#include "cic/diagnostics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <set>

#include "cic/estimators.hpp"

namespace cic {

namespace {

struct GroupStats {
  std::size_t n = 0;
  double mean = 0.0;
  double var = 0.0;  // sample variance, 0 when n < 2
};

GroupStats group_stats(const std::vector<double>& v) {
  GroupStats g;
  g.n = v.size();
  if (g.n == 0) return g;
  for (double x : v) g.mean += x;
  g.mean /= static_cast<double>(g.n);
  if (g.n >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - g.mean) * (x - g.mean);
    g.var = ss / static_cast<double>(g.n - 1);
  }
  return g;
}

DiagnosticResult welch_balance(const std::vector<double>& treated,
                               const std::vector<double>& control, std::string name) {
  if (treated.empty() || control.empty())
    fail(errc::empty_group, "balance test needs observations in both treatment arms");
  GroupStats g1 = group_stats(treated);
  GroupStats g0 = group_stats(control);

  DiagnosticResult r;
  r.name = std::move(name);
  r.estimate = g1.mean - g0.mean;

  double pooled = std::sqrt((g1.var + g0.var) / 2.0);
  if (pooled == 0.0) {
    // both groups constant: the difference is exact, no sampling uncertainty
    r.std_diff = r.estimate == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    r.statistic = 0.0;
    r.p_value = r.estimate == 0.0 ? 1.0 : 0.0;
  } else {
    r.std_diff = 100.0 * std::abs(r.estimate) / pooled;
    double a = g1.var / static_cast<double>(g1.n);
    double b = g0.var / static_cast<double>(g0.n);
    r.statistic = r.estimate / std::sqrt(a + b);
    double df_num = (a + b) * (a + b);
    double df_den = (g1.n > 1 ? a * a / static_cast<double>(g1.n - 1) : 0.0) +
                    (g0.n > 1 ? b * b / static_cast<double>(g0.n - 1) : 0.0);
    double df = df_num / df_den;
    boost::math::students_t dist(df);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  }
  r.flagged = r.std_diff > 20.0;
  return r;
}

std::vector<double> arm_outcomes(const Dataset& data, int period, int arm) {
  std::vector<double> v;
  for (const Observation& o : data.rows) {
    if (o.t == period && o.d == arm) v.push_back(o.y);
  }
  return v;
}

}  // namespace

DiagnosticResult balance_test(const Dataset& data, int period) {
  if (period != 0 && period != 1) fail(errc::bad_config, "period must be 0 or 1");
  DiagnosticResult r = welch_balance(arm_outcomes(data, period, 1), arm_outcomes(data, period, 0),
                                     period == 0 ? "balance_pre" : "balance_post");
  return r;
}

DiagnosticResult pretrend_implication_test(const Dataset& data) {
  DiagnosticResult r = welch_balance(arm_outcomes(data, 0, 1), arm_outcomes(data, 0, 0),
                                     "pretrend_implication");
  r.flagged = r.p_value < 0.05;
  if (r.flagged) r.note = "period-0 means differ across arms; identification suspect";
  return r;
}

DiagnosticResult attrition_check(const Dataset& data) {
  if (data.design != StudyDesign::panel)
    fail(errc::not_panel, "attrition is undefined without unit identity across periods");
  std::vector<char> in0(data.cluster_labels.size(), 0), in1(data.cluster_labels.size(), 0);
  for (const Observation& o : data.rows) {
    (o.t == 0 ? in0 : in1)[static_cast<std::size_t>(o.cluster)] = 1;
  }
  std::vector<double> treated, control;
  std::size_t retained = 0, total = 0;
  for (std::size_t c = 0; c < data.cluster_labels.size(); ++c) {
    if (in0[c] || in1[c]) ++total;
    if (in0[c] && in1[c]) ++retained;
  }
  for (const Observation& o : data.rows) {
    auto c = static_cast<std::size_t>(o.cluster);
    if (o.t != 0 || !in0[c] || !in1[c]) continue;
    (o.d == 1 ? treated : control).push_back(o.y);
  }
  DiagnosticResult r = welch_balance(treated, control, "attrition");
  r.note = std::to_string(retained) + " of " + std::to_string(total) +
           " clusters observed in both periods";
  return r;
}

std::vector<DiagnosticResult> exclusion_restriction_test(const Dataset& data,
                                                         const BootstrapConfig& cfg) {
  CellPartition part = partition_cells(data);
  StrataShares shares = estimate_strata_shares(part, /*min_pc=*/0.0);
  bool with_always_takers = !part.one_sided && shares.p_a >= 0.01;

  std::vector<std::pair<int, int>> cells = {{1, 0}, {0, 0}};
  if (with_always_takers) {
    cells.push_back({0, 1});
    cells.push_back({1, 1});
  }
  StatisticFn stat = [cells](const Dataset& d) {
    CellPartition p = partition_cells(d);
    std::vector<double> out;
    out.reserve(cells.size());
    for (auto [cd, cm] : cells) out.push_back(direct_effect_cell(p, cd, cm, {}).average);
    return out;
  };
  BootstrapRun run = cluster_bootstrap(data, stat, cfg);

  std::vector<DiagnosticResult> out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    DiagnosticResult r;
    r.name = "exclusion_theta_" + std::to_string(cells[k].first) +
             std::to_string(cells[k].second) + "_" + std::to_string(cells[k].first);
    r.estimate = run.results[k].point;
    r.statistic = run.results[k].se == 0.0
                      ? 0.0
                      : run.results[k].point / run.results[k].se;
    r.p_value = run.results[k].p_value;
    r.std_diff = std::numeric_limits<double>::quiet_NaN();
    r.flagged = r.p_value < 0.05;
    if (r.flagged) r.note = "direct effect differs from zero at 5%";
    out.push_back(std::move(r));
  }
  if (!with_always_takers) {
    DiagnosticResult r;
    r.name = "exclusion_always_taker_cells";
    r.estimate = std::numeric_limits<double>::quiet_NaN();
    r.p_value = std::numeric_limits<double>::quiet_NaN();
    r.std_diff = std::numeric_limits<double>::quiet_NaN();
    r.note = "skipped: no always-takers";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DiagnosticResult> run_all_diagnostics(const Dataset& data,
                                                  const BootstrapConfig& cfg) {
  std::vector<DiagnosticResult> out;
  out.push_back(balance_test(data, 0));
  out.push_back(balance_test(data, 1));
  out.push_back(pretrend_implication_test(data));
  if (data.design == StudyDesign::panel) {
    out.push_back(attrition_check(data));
  } else {
    DiagnosticResult r;
    r.name = "attrition";
    r.estimate = std::numeric_limits<double>::quiet_NaN();
    r.p_value = std::numeric_limits<double>::quiet_NaN();
    r.std_diff = std::numeric_limits<double>::quiet_NaN();
    r.note = "n/a for repeated cross-sections";
    out.push_back(std::move(r));
  }
  for (auto& r : exclusion_restriction_test(data, cfg)) out.push_back(std::move(r));
  return out;
}

}  // namespace cic
