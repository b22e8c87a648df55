#include "cic/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cic/did.hpp"
#include "cic/errors.hpp"
#include "cic/estimators.hpp"
#include "cic/parallel.hpp"
#include "cic/rng.hpp"

namespace cic {
namespace {

double apply_link(Link link, double x) { return link == Link::identity ? x : std::exp(x); }

// Neumaier compensated sum; keeps identity-link oracle truths exact.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + c; }
};

// Stratum from the mediator threshold: M(d) = 1{d + U + V > 0}.
enum Stratum { always = 0, complier = 1, never = 2 };

Stratum stratum_of(double u, double v) {
  double s = u + v;
  if (s > 0.0) return always;
  if (1.0 + s <= 0.0) return never;
  return complier;
}

}  // namespace

Dataset draw_dgp(const SimulationDesign& design, std::uint64_t rep_index) {
  if (design.n == 0) fail(errc::bad_config, "simulation sample size must be positive");
  std::mt19937_64 gen = make_stream(design.seed, rng_domain::dgp, rep_index);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution half(0.5);

  Dataset data;
  data.design = StudyDesign::repeated_cross_section;
  data.rows.reserve(design.n);
  data.cluster_labels.reserve(design.n);
  for (std::size_t i = 0; i < design.n; ++i) {
    double u = unif(gen);
    double v = normal(gen);
    int t = half(gen) ? 1 : 0;
    int d = 0;
    if (design.assignment == Assignment::random) {
      d = half(gen) ? 1 : 0;
    } else {
      double q = normal(gen);
      d = (u + q > 0.0) ? 1 : 0;
    }
    int m = (d + u + v > 0.0) ? 1 : 0;
    double lin = (design.b0 + design.bd * d + design.bm * m + design.bdm * d * m) * t + u;
    Observation row;
    row.cluster = static_cast<std::int32_t>(i);
    row.y = apply_link(design.link, lin);
    row.d = static_cast<std::uint8_t>(d);
    row.m = static_cast<std::uint8_t>(m);
    row.t = static_cast<std::uint8_t>(t);
    data.rows.push_back(row);
    data.cluster_labels.push_back(std::to_string(i + 1));
  }
  return data;
}

double TruthTable::truth_for(std::string_view tag) const {
  if (tag == "theta_n") return theta_n;
  if (tag == "theta_a") return theta_a;
  if (tag == "Delta_c") return Delta_c;
  if (tag == "theta_c_1") return theta_c_1;
  if (tag == "theta_c_0") return theta_c_0;
  if (tag == "delta_c_1") return delta_c_1;
  if (tag == "delta_c_0") return delta_c_0;
  if (tag == "theta_10_1") return theta_10_1;
  if (tag == "theta_01_0") return theta_01_0;
  fail(errc::bad_config, "no oracle truth for estimand '" + std::string(tag) + "'");
}

TruthTable true_effects_oracle(const SimulationDesign& design, std::size_t draws) {
  if (draws == 0) fail(errc::bad_config, "oracle draw count must be positive");
  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t n_chunks = (draws + kChunk - 1) / kChunk;
  const bool selective = design.assignment == Assignment::selective;

  // Per-chunk accumulators with per-chunk streams keep the result independent
  // of the thread count.
  struct ChunkSums {
    double count[3] = {0.0, 0.0, 0.0};  // always, complier, never
    Kahan direct1_a;                    // Y1(1,1)-Y1(0,1) over always-takers
    Kahan direct0_n;                    // Y1(1,0)-Y1(0,0) over never-takers
    Kahan total_c, direct1_c, direct0_c, indirect1_c, indirect0_c;
    double count_n_d1 = 0.0, count_a_d0 = 0.0;  // selective-assignment cells
    Kahan direct0_n_d1, direct1_a_d0;
  };
  std::vector<ChunkSums> chunks(n_chunks);

  parallel_for(n_chunks, design.threads, [&](std::size_t ci) {
    std::mt19937_64 gen = make_stream(design.seed, rng_domain::oracle, ci);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t lo = ci * kChunk;
    const std::size_t hi = std::min(draws, lo + kChunk);
    ChunkSums& s = chunks[ci];
    for (std::size_t i = lo; i < hi; ++i) {
      double u = unif(gen);
      double v = normal(gen);
      double y11 = apply_link(design.link, design.b0 + design.bd + design.bm + design.bdm + u);
      double y10 = apply_link(design.link, design.b0 + design.bd + u);
      double y01 = apply_link(design.link, design.b0 + design.bm + u);
      double y00 = apply_link(design.link, design.b0 + u);
      int d = 0;
      if (selective) {
        double q = normal(gen);
        d = (u + q > 0.0) ? 1 : 0;
      }
      switch (stratum_of(u, v)) {
        case always:
          s.count[always] += 1.0;
          s.direct1_a.add(y11 - y01);
          if (selective && d == 0) {
            s.count_a_d0 += 1.0;
            s.direct1_a_d0.add(y11 - y01);
          }
          break;
        case never:
          s.count[never] += 1.0;
          s.direct0_n.add(y10 - y00);
          if (selective && d == 1) {
            s.count_n_d1 += 1.0;
            s.direct0_n_d1.add(y10 - y00);
          }
          break;
        case complier:
          s.count[complier] += 1.0;
          s.total_c.add(y11 - y00);
          s.direct1_c.add(y11 - y01);
          s.direct0_c.add(y10 - y00);
          s.indirect1_c.add(y11 - y10);
          s.indirect0_c.add(y01 - y00);
          break;
      }
    }
  });

  double count[3] = {0.0, 0.0, 0.0};
  double count_n_d1 = 0.0, count_a_d0 = 0.0;
  Kahan direct1_a, direct0_n, total_c, direct1_c, direct0_c, indirect1_c, indirect0_c;
  Kahan direct0_n_d1, direct1_a_d0;
  for (const ChunkSums& s : chunks) {
    for (int k = 0; k < 3; ++k) count[k] += s.count[k];
    count_n_d1 += s.count_n_d1;
    count_a_d0 += s.count_a_d0;
    direct1_a.add(s.direct1_a.value());
    direct0_n.add(s.direct0_n.value());
    total_c.add(s.total_c.value());
    direct1_c.add(s.direct1_c.value());
    direct0_c.add(s.direct0_c.value());
    indirect1_c.add(s.indirect1_c.value());
    indirect0_c.add(s.indirect0_c.value());
    direct0_n_d1.add(s.direct0_n_d1.value());
    direct1_a_d0.add(s.direct1_a_d0.value());
  }
  if (count[always] == 0.0 || count[complier] == 0.0 || count[never] == 0.0)
    fail(errc::empty_group, "oracle stratum empty; increase the draw count");

  TruthTable t;
  t.draws = draws;
  t.p_a = count[always] / static_cast<double>(draws);
  t.p_c = count[complier] / static_cast<double>(draws);
  t.p_n = count[never] / static_cast<double>(draws);
  t.theta_a = direct1_a.value() / count[always];
  t.theta_n = direct0_n.value() / count[never];
  t.Delta_c = total_c.value() / count[complier];
  t.theta_c_1 = direct1_c.value() / count[complier];
  t.theta_c_0 = direct0_c.value() / count[complier];
  t.delta_c_1 = indirect1_c.value() / count[complier];
  t.delta_c_0 = indirect0_c.value() / count[complier];
  if (selective) {
    if (count_n_d1 == 0.0 || count_a_d0 == 0.0)
      fail(errc::empty_group, "oracle assignment cell empty; increase the draw count");
    t.theta_10_1 = direct0_n_d1.value() / count_n_d1;
    t.theta_01_0 = direct1_a_d0.value() / count_a_d0;
  } else {
    // Random assignment is independent of the strata, so the cell versions
    // coincide with the stratum effects.
    t.theta_10_1 = t.theta_n;
    t.theta_01_0 = t.theta_a;
  }
  return t;
}

const std::vector<std::string>& monte_carlo_tags() {
  static const std::vector<std::string> tags = {
      "theta_n",   "theta_a",   "Delta_c",    "theta_c_1", "theta_c_0",
      "delta_c_1", "delta_c_0", "theta_10_1", "theta_01_0"};
  return tags;
}

MonteCarloReport run_monte_carlo(const SimulationDesign& design, std::size_t oracle_draws) {
  if (design.reps <= 0) fail(errc::bad_config, "replication count must be positive");
  MonteCarloReport report;
  report.design = design;
  report.oracle_draws = oracle_draws;
  report.truths = true_effects_oracle(design, oracle_draws);

  const std::vector<std::string>& tags = monte_carlo_tags();
  const std::size_t n_tags = tags.size();
  const std::size_t reps = static_cast<std::size_t>(design.reps);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> cic_est(n_tags, std::vector<double>(reps, nan));
  std::vector<std::vector<double>> did_est(n_tags, std::vector<double>(reps, nan));
  const std::vector<double> no_quantiles;

  parallel_for(reps, design.threads, [&](std::size_t r) {
    Dataset data = draw_dgp(design, r);
    auto pull = [&](const EffectSuite& suite, std::vector<std::vector<double>>& out) {
      for (std::size_t k = 0; k < n_tags; ++k) {
        const EffectEstimate& e = suite.at(tags[k]);
        if (e.available) out[k][r] = e.average;
      }
    };
    try {
      CellPartition part = partition_cells(data);
      try {
        pull(estimate_all(part, no_quantiles), cic_est);
      } catch (const Error&) {
      }
      try {
        pull(did_effects(part, no_quantiles), did_est);
      } catch (const Error&) {
      }
    } catch (const Error&) {
    }
  });

  auto summarize = [&](const std::vector<double>& est, const std::string& tag) {
    MonteCarloRow row;
    row.tag = tag;
    row.truth = report.truths.truth_for(tag);
    Kahan sum;
    std::size_t n_ok = 0;
    for (double x : est) {
      if (!std::isnan(x)) {
        sum.add(x);
        ++n_ok;
      }
    }
    row.n_failed = static_cast<int>(reps - n_ok);
    if (n_ok == 0) {
      row.bias = row.sd = row.rmse = row.relr = nan;
      return row;
    }
    double mean = sum.value() / static_cast<double>(n_ok);
    Kahan ss;
    for (double x : est) {
      if (!std::isnan(x)) {
        double dev = x - mean;
        ss.add(dev * dev);
      }
    }
    row.bias = mean - row.truth;
    // Population (1/R) variance so rmse^2 = bias^2 + sd^2 exactly.
    row.sd = std::sqrt(ss.value() / static_cast<double>(n_ok));
    row.rmse = std::sqrt(row.bias * row.bias + row.sd * row.sd);
    row.relr = row.truth != 0.0 ? row.rmse / std::abs(row.truth) : nan;
    return row;
  };

  report.cic.reserve(n_tags);
  report.did.reserve(n_tags);
  for (std::size_t k = 0; k < n_tags; ++k) {
    report.cic.push_back(summarize(cic_est[k], tags[k]));
    report.did.push_back(summarize(did_est[k], tags[k]));
  }
  return report;
}

}  // namespace cic
