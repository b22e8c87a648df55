#include "cic/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

namespace cic {

namespace {

constexpr double kMinAlwaysTakerShare = 0.01;

int dm_index(int d, int m) { return d * 2 + m; }

std::string cell_tag(int d, int m) {
  return "theta_" + std::to_string(d) + std::to_string(m) + "_" + std::to_string(d);
}

EffectEstimate skipped(std::string tag, std::string reason) {
  EffectEstimate e;
  e.tag = std::move(tag);
  e.available = false;
  e.skip_reason = std::move(reason);
  return e;
}

// Period distributions and partner-transformed period-0 samples, shared by
// every estimand. tr[dm] is the period-0 sample of cell (d,m) pushed through
// the opposite-arm transform Q_{1-d,m}; it estimates the period-1 outcome
// distribution of cell (d,m) had treatment been 1-d.
struct Ctx {
  std::optional<EmpiricalDistribution> t0[4];
  std::optional<EmpiricalDistribution> t1[4];
  std::optional<EmpiricalDistribution> tr[4];
  std::optional<MixtureCdf> dd[4];  // complier counterfactual CDFs, see below
  StrataShares sh;
  int degenerate = 0;
};

Ctx build_ctx(const CellPartition& part, const TransformSet& tf, const StrataShares& sh) {
  Ctx ctx;
  ctx.sh = sh;
  for (int d = 0; d < 2; ++d) {
    for (int m = 0; m < 2; ++m) {
      int dm = dm_index(d, m);
      if (!part.cell(d, m, 0).empty()) ctx.t0[dm].emplace(part.cell(d, m, 0));
      if (!part.cell(d, m, 1).empty()) ctx.t1[dm].emplace(part.cell(d, m, 1));
    }
  }
  for (int d = 0; d < 2; ++d) {
    for (int m = 0; m < 2; ++m) {
      int dm = dm_index(d, m);
      int partner = dm_index(1 - d, m);
      if (!ctx.t0[dm] || !tf.map[partner]) continue;
      std::vector<double> mapped;
      mapped.reserve(part.cell(d, m, 0).size());
      for (double y : part.cell(d, m, 0)) mapped.push_back(tf.map[partner](y));
      ctx.tr[dm].emplace(std::move(mapped));
    }
  }

  // Complier counterfactual CDFs as signed mixtures:
  //   dd[0]: Y1(1,0) from  p00*F[tr 00] - p01*F[t1 10]
  //   dd[1]: Y1(0,0) from  p00*F[t1 00] - p01*F[tr 10]
  //   dd[2]: Y1(1,1) from  p11*F[t1 11] - p10*F[tr 01]
  //   dd[3]: Y1(0,1) from  p11*F[tr 11] - p10*F[t1 01]
  // all divided by the pooled complier share.
  double p00 = sh.p_m_given_d[0][0], p01 = sh.p_m_given_d[1][0];
  double p11 = sh.p_m_given_d[1][1], p10 = sh.p_m_given_d[0][1];
  auto make = [&](const std::optional<EmpiricalDistribution>& pos, double wp,
                  const std::optional<EmpiricalDistribution>& neg,
                  double wn) -> std::optional<MixtureCdf> {
    if (!pos) return std::nullopt;
    if (!neg && wn != 0.0) return std::nullopt;
    return build_mixture_cdf(&*pos, wp, neg ? &*neg : nullptr, neg ? wn : 0.0);
  };
  double pc = sh.p_c;
  ctx.dd[0] = make(ctx.tr[dm_index(0, 0)], p00 / pc, ctx.t1[dm_index(1, 0)], p01 / pc);
  ctx.dd[1] = make(ctx.t1[dm_index(0, 0)], p00 / pc, ctx.tr[dm_index(1, 0)], p01 / pc);
  ctx.dd[2] = make(ctx.t1[dm_index(1, 1)], p11 / pc, ctx.tr[dm_index(0, 1)], p10 / pc);
  ctx.dd[3] = make(ctx.tr[dm_index(1, 1)], p11 / pc, ctx.t1[dm_index(0, 1)], p10 / pc);
  return ctx;
}

EffectEstimate cell_effect_from(const Ctx& ctx, int d, int m, const std::vector<double>& qgrid) {
  int dm = dm_index(d, m);
  EffectEstimate e;
  e.tag = cell_tag(d, m);
  if (!ctx.t1[dm] || !ctx.tr[dm]) {
    return skipped(e.tag, "no always-takers");  // only the (0,1) group can be absent
  }
  const EmpiricalDistribution& obs = *ctx.t1[dm];
  const EmpiricalDistribution& cf = *ctx.tr[dm];
  double sign = d == 1 ? 1.0 : -1.0;  // treated cells report observed - counterfactual
  e.average = sign * (obs.mean() - cf.mean());
  e.quantiles.reserve(qgrid.size());
  for (double q : qgrid) e.quantiles.push_back({q, sign * (obs.quantile(q) - cf.quantile(q))});
  return e;
}

struct MeanTerm {
  double weight;
  double sign;
  const std::optional<EmpiricalDistribution>* sample;
};

// Weighted combination over p_c; a missing sample only passes when its weight
// is exactly 0 (term identically absent, e.g. one-sided designs).
std::optional<double> combine_means(std::initializer_list<MeanTerm> terms, double pc) {
  double acc = 0.0;
  for (const MeanTerm& t : terms) {
    if (t.weight == 0.0) continue;
    if (!t.sample->has_value()) return std::nullopt;
    acc += t.sign * t.weight * (*t.sample)->mean();
  }
  return acc / pc;
}

EffectEstimate quantile_difference(Ctx& ctx, std::string tag, std::optional<double> average,
                                   int dd_hi, int dd_lo, const std::vector<double>& qgrid) {
  if (!average.has_value()) return skipped(std::move(tag), "no always-takers");
  EffectEstimate e;
  e.tag = std::move(tag);
  e.average = *average;
  if (!qgrid.empty()) {
    if (!ctx.dd[dd_hi] || !ctx.dd[dd_lo]) {
      // averages may survive a missing mixture only when the missing side had
      // zero weight; quantiles need both counterfactual CDFs
      e.quantiles.clear();
    } else {
      for (double q : qgrid) {
        bool deg_hi = false, deg_lo = false;
        double hi = invert_cdf(*ctx.dd[dd_hi], q, &deg_hi);
        double lo = invert_cdf(*ctx.dd[dd_lo], q, &deg_lo);
        ctx.degenerate += static_cast<int>(deg_hi) + static_cast<int>(deg_lo);
        e.quantiles.push_back({q, hi - lo});
      }
    }
  }
  return e;
}

}  // namespace

void validate_quantile_grid(const std::vector<double>& qgrid) {
  for (std::size_t i = 0; i < qgrid.size(); ++i) {
    if (!(qgrid[i] > 0.0 && qgrid[i] < 1.0))
      fail(errc::q_out_of_range, "quantile levels must lie strictly inside (0,1)");
    if (i > 0 && qgrid[i] <= qgrid[i - 1])
      fail(errc::bad_config, "quantile levels must increase strictly");
  }
}

StrataShares estimate_strata_shares(const CellPartition& part, double min_pc) {
  double n11 = static_cast<double>(part.count(1, 1, 1));
  double n10 = static_cast<double>(part.count(1, 0, 1));
  double n01 = static_cast<double>(part.count(0, 1, 1));
  double n00 = static_cast<double>(part.count(0, 0, 1));
  if (n11 + n10 == 0.0 || n01 + n00 == 0.0)
    fail(errc::empty_group, "strata shares need period-1 observations in both treatment arms");

  StrataShares sh;
  sh.p_m_given_d[1][1] = n11 / (n11 + n10);
  sh.p_m_given_d[1][0] = n10 / (n11 + n10);
  sh.p_m_given_d[0][1] = n01 / (n01 + n00);
  sh.p_m_given_d[0][0] = n00 / (n01 + n00);
  sh.p_a = sh.p_m_given_d[0][1];
  sh.p_n = sh.p_m_given_d[1][0];
  sh.p_c = ((sh.p_m_given_d[1][1] - sh.p_m_given_d[0][1]) +
            (sh.p_m_given_d[0][0] - sh.p_m_given_d[1][0])) /
           2.0;
  if (sh.p_c < min_pc)
    fail(errc::weak_compliers, "complier share " + std::to_string(sh.p_c) + " below " +
                                   std::to_string(min_pc));
  return sh;
}

const std::vector<std::string>& estimand_tags() {
  static const std::vector<std::string> tags = {
      "theta_n",    "theta_a",    "Delta_c",    "theta_c_1", "theta_c_0", "delta_c_1",
      "delta_c_0",  "theta_10_1", "theta_00_0", "theta_01_0", "theta_11_1", "ATE"};
  return tags;
}

const EffectEstimate& EffectSuite::at(std::string_view tag) const {
  for (const EffectEstimate& e : effects) {
    if (e.tag == tag) return e;
  }
  fail(errc::bad_config, "unknown estimand tag '" + std::string(tag) + "'");
}

TransformSet cic_transforms(const CellPartition& part) {
  TransformSet tf;
  for (int d = 0; d < 2; ++d) {
    for (int m = 0; m < 2; ++m) {
      int dm = dm_index(d, m);
      const auto& c0 = part.cell(d, m, 0);
      const auto& c1 = part.cell(d, m, 1);
      if (c0.empty() || c1.empty()) continue;
      auto f0 = std::make_shared<EmpiricalDistribution>(c0);
      auto f1 = std::make_shared<EmpiricalDistribution>(c1);
      tf.map[dm] = [f0, f1](double y) { return qq_transform(*f0, *f1, y); };
    }
  }
  return tf;
}

EffectSuite estimate_with_transforms(const CellPartition& part, const TransformSet& transforms,
                                     const std::vector<double>& qgrid, double min_pc) {
  return estimate_with_transforms(part, transforms, qgrid, estimate_strata_shares(part, min_pc));
}

EffectSuite estimate_with_transforms(const CellPartition& part, const TransformSet& transforms,
                                     const std::vector<double>& qgrid, const StrataShares& sh) {
  validate_quantile_grid(qgrid);
  Ctx ctx = build_ctx(part, transforms, sh);

  double p00 = sh.p_m_given_d[0][0], p01 = sh.p_m_given_d[1][0];
  double p11 = sh.p_m_given_d[1][1], p10 = sh.p_m_given_d[0][1];
  double pc = sh.p_c;
  const int i00 = dm_index(0, 0), i01 = dm_index(0, 1), i10 = dm_index(1, 0), i11 = dm_index(1, 1);

  EffectSuite suite;
  suite.shares = sh;
  suite.warnings = part.warnings;

  EffectEstimate th10 = cell_effect_from(ctx, 1, 0, qgrid);
  EffectEstimate th00 = cell_effect_from(ctx, 0, 0, qgrid);
  EffectEstimate th01 = cell_effect_from(ctx, 0, 1, qgrid);
  EffectEstimate th11 = cell_effect_from(ctx, 1, 1, qgrid);

  EffectEstimate theta_n = th10;
  theta_n.tag = "theta_n";
  EffectEstimate theta_a = th01;
  theta_a.tag = "theta_a";
  if (theta_a.available && sh.p_a < kMinAlwaysTakerShare) {
    theta_a = skipped("theta_a", "always-taker share below 0.01");
  }

  // theta_c at each mediator value, from the two cell effects sharing that value.
  std::optional<double> tc0_avg;
  if (th00.available && th10.available) {
    tc0_avg = (p00 * th00.average - p01 * th10.average) / pc;
  }
  EffectEstimate theta_c_0 = quantile_difference(ctx, "theta_c_0", tc0_avg, 0, 1, qgrid);
  std::optional<double> tc1_avg;
  if (th11.available) {
    if (th01.available) {
      tc1_avg = (p11 * th11.average - p10 * th01.average) / pc;
    } else if (p10 == 0.0) {
      tc1_avg = p11 * th11.average / pc;
    }
  }
  EffectEstimate theta_c_1 = quantile_difference(ctx, "theta_c_1", tc1_avg, 2, 3, qgrid);

  auto Dc = combine_means({{p11, 1.0, &ctx.t1[i11]},
                           {p10, -1.0, &ctx.tr[i01]},
                           {p00, -1.0, &ctx.t1[i00]},
                           {p01, 1.0, &ctx.tr[i10]}},
                          pc);
  auto dc0 = combine_means({{p11, 1.0, &ctx.tr[i11]},
                            {p10, -1.0, &ctx.t1[i01]},
                            {p00, -1.0, &ctx.t1[i00]},
                            {p01, 1.0, &ctx.tr[i10]}},
                           pc);
  auto dc1 = combine_means({{p11, 1.0, &ctx.t1[i11]},
                            {p10, -1.0, &ctx.tr[i01]},
                            {p00, -1.0, &ctx.tr[i00]},
                            {p01, 1.0, &ctx.t1[i10]}},
                           pc);
  EffectEstimate Delta_c = quantile_difference(ctx, "Delta_c", Dc, 2, 1, qgrid);
  EffectEstimate delta_c_0 = quantile_difference(ctx, "delta_c_0", dc0, 3, 1, qgrid);
  EffectEstimate delta_c_1 = quantile_difference(ctx, "delta_c_1", dc1, 2, 0, qgrid);

  // Population ATE on the treated period, mediator pooled within arm. The
  // share-weighted form keeps the aggregation identity exact.
  EffectEstimate ate;
  ate.tag = "ATE";
  {
    double d1 = 0.0, d0 = 0.0;
    bool ok = true;
    auto add = [&](double& acc, double w, const std::optional<EmpiricalDistribution>& s) {
      if (w == 0.0) return;
      if (!s) {
        ok = false;
        return;
      }
      acc += w * s->mean();
    };
    add(d1, p01, ctx.t1[i10]);
    add(d1, p11, ctx.t1[i11]);
    add(d0, p00, ctx.t1[i00]);
    add(d0, p10, ctx.t1[i01]);
    if (ok) {
      ate.average = d1 - d0;
      if (!qgrid.empty()) {
        std::vector<double> pool1(part.cell(1, 0, 1));
        pool1.insert(pool1.end(), part.cell(1, 1, 1).begin(), part.cell(1, 1, 1).end());
        std::vector<double> pool0(part.cell(0, 0, 1));
        pool0.insert(pool0.end(), part.cell(0, 1, 1).begin(), part.cell(0, 1, 1).end());
        EmpiricalDistribution f1(std::move(pool1)), f0(std::move(pool0));
        for (double q : qgrid) ate.quantiles.push_back({q, f1.quantile(q) - f0.quantile(q)});
      }
    } else {
      ate = skipped("ATE", "missing period-1 cell");
    }
  }

  suite.effects = {theta_n, theta_a,  Delta_c, theta_c_1, theta_c_0, delta_c_1,
                   delta_c_0, th10,   th00,    th01,      th11,      ate};
  if (ctx.degenerate > 0) {
    suite.warnings.push_back(std::to_string(ctx.degenerate) +
                             " quantile inversions hit the top of the support grid");
  }
  return suite;
}

EffectSuite estimate_all(const CellPartition& part, const std::vector<double>& qgrid,
                         double min_pc) {
  return estimate_with_transforms(part, cic_transforms(part), qgrid, min_pc);
}

EffectEstimate direct_effect_cell(const CellPartition& part, int d, int m,
                                  const std::vector<double>& qgrid) {
  validate_quantile_grid(qgrid);
  if (d < 0 || d > 1 || m < 0 || m > 1) fail(errc::bad_config, "cell indices must be 0 or 1");
  const auto& obs0 = part.cell(d, m, 0);
  const auto& obs1 = part.cell(d, m, 1);
  const auto& par0 = part.cell(1 - d, m, 0);
  const auto& par1 = part.cell(1 - d, m, 1);
  auto require = [&](const std::vector<double>& cell, int cd, int cm, int ct) {
    if (!cell.empty()) return;
    errc code = cm == 1 && cd == 0 ? errc::no_always_takers : errc::empty_cell;
    fail(code, "cell (d=" + std::to_string(cd) + ",m=" + std::to_string(cm) +
                   ",t=" + std::to_string(ct) + ") is empty");
  };
  require(obs0, d, m, 0);
  require(obs1, d, m, 1);
  require(par0, 1 - d, m, 0);
  require(par1, 1 - d, m, 1);

  EmpiricalDistribution f0(par0), f1(par1), obs(obs1);
  EmpiricalDistribution cf(qq_transform(f0, f1, obs0));
  EffectEstimate e;
  e.tag = cell_tag(d, m);
  double sign = d == 1 ? 1.0 : -1.0;
  e.average = sign * (obs.mean() - cf.mean());
  for (double q : qgrid) e.quantiles.push_back({q, sign * (obs.quantile(q) - cf.quantile(q))});
  return e;
}

EffectEstimate never_taker_effects(const CellPartition& part, const std::vector<double>& qgrid) {
  EffectEstimate e = direct_effect_cell(part, 1, 0, qgrid);
  e.tag = "theta_n";
  return e;
}

EffectEstimate always_taker_effects(const CellPartition& part, const StrataShares& shares,
                                    const std::vector<double>& qgrid, double min_pa) {
  if (shares.p_a < min_pa)
    fail(errc::no_always_takers, "always-taker share " + std::to_string(shares.p_a) +
                                     " below " + std::to_string(min_pa));
  EffectEstimate e = direct_effect_cell(part, 0, 1, qgrid);
  e.tag = "theta_a";
  return e;
}

ComplierDirectEffects complier_direct_effects(const CellPartition& part,
                                              const StrataShares& shares,
                                              const std::vector<double>& qgrid) {
  EffectSuite suite = estimate_with_transforms(part, cic_transforms(part), qgrid, shares);
  return {suite.at("theta_c_0"), suite.at("theta_c_1")};
}

ComplierTotalIndirect complier_total_and_indirect(const CellPartition& part,
                                                  const StrataShares& shares,
                                                  const std::vector<double>& qgrid) {
  EffectSuite suite = estimate_with_transforms(part, cic_transforms(part), qgrid, shares);
  return {suite.at("Delta_c"), suite.at("delta_c_0"), suite.at("delta_c_1")};
}

EffectEstimate population_ate_qte(const CellPartition& part, const std::vector<double>& qgrid) {
  validate_quantile_grid(qgrid);
  std::vector<double> pool1(part.cell(1, 0, 1));
  pool1.insert(pool1.end(), part.cell(1, 1, 1).begin(), part.cell(1, 1, 1).end());
  std::vector<double> pool0(part.cell(0, 0, 1));
  pool0.insert(pool0.end(), part.cell(0, 1, 1).begin(), part.cell(0, 1, 1).end());
  if (pool1.empty() || pool0.empty())
    fail(errc::empty_group, "period-1 observations required in both treatment arms");
  EmpiricalDistribution f1(std::move(pool1)), f0(std::move(pool0));
  EffectEstimate e;
  e.tag = "ATE";
  e.average = f1.mean() - f0.mean();
  for (double q : qgrid) e.quantiles.push_back({q, f1.quantile(q) - f0.quantile(q)});
  return e;
}

}  // namespace cic
