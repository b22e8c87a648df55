#include "cic/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "cic/errors.hpp"
#include "cic/parallel.hpp"
#include "cic/rng.hpp"

namespace cic {

namespace {

// Row indices grouped by sampling unit. Repeated cross-sections resample rows,
// so each row is its own unit there.
std::vector<std::vector<std::size_t>> unit_rows(const Dataset& data) {
  std::vector<std::vector<std::size_t>> groups;
  if (data.design == StudyDesign::panel) {
    groups.resize(data.cluster_labels.size());
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      groups[static_cast<std::size_t>(data.rows[i].cluster)].push_back(i);
    }
    // Unused labels (all rows dropped) would resample empty units; prune them.
    groups.erase(std::remove_if(groups.begin(), groups.end(),
                                [](const auto& g) { return g.empty(); }),
                 groups.end());
  } else {
    groups.resize(data.rows.size());
    for (std::size_t i = 0; i < data.rows.size(); ++i) groups[i].push_back(i);
  }
  return groups;
}

Dataset assemble(const Dataset& data, const std::vector<std::vector<std::size_t>>& groups,
                 const std::vector<std::size_t>& picks) {
  Dataset out;
  out.design = data.design;
  out.covariate_names = data.covariate_names;
  out.covariate_cols.resize(data.covariate_cols.size());
  out.cluster_labels.reserve(picks.size());
  std::size_t total = 0;
  for (std::size_t u : picks) total += groups[u].size();
  out.rows.reserve(total);
  for (auto& col : out.covariate_cols) col.reserve(total);
  for (std::size_t k = 0; k < picks.size(); ++k) {
    const auto& rows = groups[picks[k]];
    out.cluster_labels.push_back(std::to_string(k + 1));
    for (std::size_t i : rows) {
      Observation o = data.rows[i];
      o.cluster = static_cast<std::int32_t>(k);  // a unit drawn twice is two units
      out.rows.push_back(o);
      for (std::size_t j = 0; j < data.covariate_cols.size(); ++j) {
        out.covariate_cols[j].push_back(data.covariate_cols[j][i]);
      }
    }
  }
  return out;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double draw_quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  double k = std::ceil(q * static_cast<double>(v.size()) - 1e-9);
  auto idx = static_cast<std::size_t>(std::max(1.0, std::min(k, static_cast<double>(v.size()))));
  return v[idx - 1];
}

}  // namespace

double normal_two_sided_p(double point, double se) {
  if (se == 0.0) return point == 0.0 ? 1.0 : 0.0;
  double z = std::abs(point) / se;
  return std::erfc(z / std::sqrt(2.0));
}

Dataset resample_units(const Dataset& data, std::mt19937_64& gen) {
  auto groups = unit_rows(data);
  if (groups.empty()) fail(errc::empty_group, "nothing to resample");
  std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
  std::vector<std::size_t> picks(groups.size());
  for (auto& p : picks) p = pick(gen);
  return assemble(data, groups, picks);
}

BootstrapRun cluster_bootstrap(const Dataset& data, const StatisticFn& statistic,
                               const BootstrapConfig& cfg) {
  if (cfg.replicates < 1) fail(errc::bad_config, "bootstrap needs at least one replicate");
  auto groups = unit_rows(data);
  if (groups.empty()) fail(errc::empty_group, "nothing to resample");

  BootstrapRun run;
  run.point = statistic(data);
  const std::size_t dim = run.point.size();
  const auto reps = static_cast<std::size_t>(cfg.replicates);

  std::vector<std::vector<double>> slots(reps);
  std::vector<char> ok(reps, 0);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    std::mt19937_64 gen = make_stream(cfg.seed, rng_domain::bootstrap, r);
    std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
    std::vector<std::size_t> picks(groups.size());
    for (auto& p : picks) p = pick(gen);
    Dataset resample = assemble(data, groups, picks);
    std::vector<double> v;
    try {
      v = statistic(resample);
    } catch (const Error&) {
      ok[r] = 0;  // replicate dropped (e.g. EmptyCell/WeakCompliers on the resample)
      return;
    }
    if (v.size() != dim)
      throw std::logic_error("statistic changed dimension across bootstrap replicates");
    slots[r] = std::move(v);
    ok[r] = 1;
  });

  for (std::size_t r = 0; r < reps; ++r) {
    if (ok[r]) {
      run.draws.push_back(std::move(slots[r]));
    } else {
      ++run.n_failed;
    }
  }
  if (static_cast<double>(run.n_failed) >
      cfg.max_failure_rate * static_cast<double>(cfg.replicates)) {
    fail(errc::too_many_failed_replicates,
         std::to_string(run.n_failed) + " of " + std::to_string(cfg.replicates) +
             " bootstrap replicates failed");
  }

  run.results.resize(dim);
  std::vector<double> coord(run.draws.size());
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t i = 0; i < run.draws.size(); ++i) coord[i] = run.draws[i][k];
    BootstrapResult& res = run.results[k];
    res.point = run.point[k];
    res.se = sample_sd(coord);
    res.p_value = normal_two_sided_p(res.point, res.se);
    res.ci_lower = draw_quantile(coord, 0.025);
    res.ci_upper = draw_quantile(coord, 0.975);
    res.n_used = static_cast<int>(run.draws.size());
    res.n_failed = run.n_failed;
  }
  return run;
}

BootstrapResult cluster_bootstrap_scalar(const Dataset& data,
                                         const std::function<double(const Dataset&)>& statistic,
                                         const BootstrapConfig& cfg) {
  BootstrapRun run = cluster_bootstrap(
      data, [&](const Dataset& d) { return std::vector<double>{statistic(d)}; }, cfg);
  return run.results.at(0);
}

std::vector<SummaryRow> summarize_bootstrap(const std::vector<std::string>& labels,
                                            const BootstrapRun& run) {
  if (labels.size() != run.results.size())
    fail(errc::bad_config, "label count does not match statistic dimension");
  std::vector<SummaryRow> rows;
  rows.reserve(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const BootstrapResult& r = run.results[k];
    rows.push_back({labels[k], r.point, r.se, r.p_value, r.ci_lower, r.ci_upper, r.n_failed});
  }
  return rows;
}

}  // namespace cic
