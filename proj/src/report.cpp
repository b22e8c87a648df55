#include "cic/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"

namespace cic {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1";

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// NaN has no JSON literal; emit null instead of nlohmann's default.
ordered_json jnum(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

void meta_line(std::ostringstream& out, const char* key, const std::string& value) {
  out << "# " << key << '\t' << value << '\n';
}

ordered_json effect_rows_json(const EstimateReport& report) {
  ordered_json rows = ordered_json::array();
  std::size_t pos = 0;
  auto stats_for = [&](ordered_json& row) {
    if (!report.with_bootstrap) return;
    const BootstrapResult& s = report.stats.at(pos);
    row["se"] = jnum(s.se);
    row["p_value"] = jnum(s.p_value);
    row["ci_lower"] = jnum(s.ci_lower);
    row["ci_upper"] = jnum(s.ci_upper);
  };
  for (const EffectEstimate& e : report.suite.effects) {
    if (!e.available) {
      ordered_json row;
      row["tag"] = e.tag;
      row["quantity"] = "average";
      row["available"] = false;
      row["skip_reason"] = e.skip_reason;
      rows.push_back(std::move(row));
      continue;
    }
    ordered_json avg;
    avg["tag"] = e.tag;
    avg["quantity"] = "average";
    avg["available"] = true;
    avg["estimate"] = jnum(e.average);
    stats_for(avg);
    ++pos;
    rows.push_back(std::move(avg));
    for (const QuantilePoint& p : e.quantiles) {
      ordered_json row;
      row["tag"] = e.tag;
      row["quantity"] = "quantile";
      row["available"] = true;
      row["q"] = p.q;
      row["estimate"] = jnum(p.value);
      stats_for(row);
      ++pos;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ordered_json row_json(const MonteCarloRow& r) {
  ordered_json row;
  row["tag"] = r.tag;
  row["truth"] = jnum(r.truth);
  row["bias"] = jnum(r.bias);
  row["sd"] = jnum(r.sd);
  row["rmse"] = jnum(r.rmse);
  row["relative_rmse"] = jnum(r.relr);
  row["n_failed"] = r.n_failed;
  return row;
}

void row_tsv(std::ostringstream& out, const char* estimator, const MonteCarloRow& r) {
  out << estimator << '\t' << r.tag << '\t' << num(r.truth) << '\t' << num(r.bias) << '\t'
      << num(r.sd) << '\t' << num(r.rmse) << '\t' << num(r.relr) << '\t' << r.n_failed << '\n';
}

}  // namespace

const char* link_name(Link link) { return link == Link::identity ? "identity" : "exponential"; }

const char* assignment_name(Assignment assignment) {
  return assignment == Assignment::random ? "random" : "selective";
}

const char* design_name(StudyDesign design) {
  return design == StudyDesign::panel ? "panel" : "rcs";
}

std::vector<CoordinateRef> coordinate_plan(const EffectSuite& suite) {
  std::vector<CoordinateRef> plan;
  for (std::size_t k = 0; k < suite.effects.size(); ++k) {
    const EffectEstimate& e = suite.effects[k];
    if (!e.available) continue;
    plan.push_back({k, -1});
    for (int j = 0; j < static_cast<int>(e.quantiles.size()); ++j) plan.push_back({k, j});
  }
  return plan;
}

std::vector<double> coordinate_values(const EffectSuite& suite,
                                      const std::vector<CoordinateRef>& plan) {
  std::vector<double> values;
  values.reserve(plan.size());
  for (const CoordinateRef& ref : plan) {
    if (ref.effect_index >= suite.effects.size())
      fail(errc::empty_group, "planned estimand missing from the suite");
    const EffectEstimate& e = suite.effects[ref.effect_index];
    if (!e.available)
      fail(errc::empty_group, "planned estimand '" + e.tag + "' unavailable in a replicate");
    if (ref.quantile_index < 0) {
      values.push_back(e.average);
    } else {
      if (ref.quantile_index >= static_cast<int>(e.quantiles.size()))
        fail(errc::empty_group, "planned quantile missing for '" + e.tag + "'");
      values.push_back(e.quantiles[static_cast<std::size_t>(ref.quantile_index)].value);
    }
  }
  return values;
}

std::string to_json(const EstimateReport& report) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "estimates";
  doc["estimator"] = report.estimator;
  doc["design"] = design_name(report.design);
  doc["n_rows"] = report.n_rows;
  doc["n_clusters"] = report.n_clusters;
  doc["dropped_rows"] = report.dropped_rows;
  doc["one_sided"] = report.one_sided;
  doc["shares"] = {{"p_a", jnum(report.suite.shares.p_a)},
                   {"p_c", jnum(report.suite.shares.p_c)},
                   {"p_n", jnum(report.suite.shares.p_n)}};
  if (report.with_bootstrap) {
    doc["bootstrap"] = {{"replicates", report.bootstrap_replicates},
                        {"failed", report.bootstrap_failed}};
  } else {
    doc["bootstrap"] = nullptr;
  }
  doc["effects"] = effect_rows_json(report);
  doc["warnings"] = report.warnings;
  return dump(doc);
}

std::string to_tsv(const EstimateReport& report) {
  std::ostringstream out;
  meta_line(out, "schema_version", kSchemaVersion);
  meta_line(out, "kind", "estimates");
  meta_line(out, "estimator", report.estimator);
  meta_line(out, "design", design_name(report.design));
  meta_line(out, "n_rows", std::to_string(report.n_rows));
  meta_line(out, "n_clusters", std::to_string(report.n_clusters));
  meta_line(out, "dropped_rows", std::to_string(report.dropped_rows));
  meta_line(out, "one_sided", report.one_sided ? "1" : "0");
  meta_line(out, "p_a", num(report.suite.shares.p_a));
  meta_line(out, "p_c", num(report.suite.shares.p_c));
  meta_line(out, "p_n", num(report.suite.shares.p_n));
  if (report.with_bootstrap) {
    meta_line(out, "bootstrap_replicates", std::to_string(report.bootstrap_replicates));
    meta_line(out, "bootstrap_failed", std::to_string(report.bootstrap_failed));
  }
  for (const std::string& w : report.warnings) meta_line(out, "warning", w);
  out << "tag\tquantity\tq\testimate\tse\tp_value\tci_lower\tci_upper\tavailable\tnote\n";
  std::size_t pos = 0;
  auto stat_cols = [&]() -> std::string {
    if (!report.with_bootstrap) return "\t\t\t";
    const BootstrapResult& s = report.stats.at(pos);
    return num(s.se) + '\t' + num(s.p_value) + '\t' + num(s.ci_lower) + '\t' + num(s.ci_upper);
  };
  for (const EffectEstimate& e : report.suite.effects) {
    if (!e.available) {
      out << e.tag << "\taverage\t\t\t\t\t\t\t0\t" << e.skip_reason << '\n';
      continue;
    }
    out << e.tag << "\taverage\t\t" << num(e.average) << '\t' << stat_cols() << "\t1\t\n";
    ++pos;
    for (const QuantilePoint& p : e.quantiles) {
      out << e.tag << "\tquantile\t" << num(p.q) << '\t' << num(p.value) << '\t' << stat_cols()
          << "\t1\t\n";
      ++pos;
    }
  }
  return out.str();
}

std::string to_json(const std::vector<DiagnosticResult>& checks) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "diagnostics";
  ordered_json rows = ordered_json::array();
  for (const DiagnosticResult& c : checks) {
    ordered_json row;
    row["name"] = c.name;
    row["estimate"] = jnum(c.estimate);
    row["statistic"] = jnum(c.statistic);
    row["p_value"] = jnum(c.p_value);
    row["std_diff"] = jnum(c.std_diff);
    row["flagged"] = c.flagged;
    row["note"] = c.note;
    rows.push_back(std::move(row));
  }
  doc["checks"] = rows;
  return dump(doc);
}

std::string to_tsv(const std::vector<DiagnosticResult>& checks) {
  std::ostringstream out;
  meta_line(out, "schema_version", kSchemaVersion);
  meta_line(out, "kind", "diagnostics");
  out << "name\testimate\tstatistic\tp_value\tstd_diff\tflagged\tnote\n";
  for (const DiagnosticResult& c : checks) {
    out << c.name << '\t' << num(c.estimate) << '\t' << num(c.statistic) << '\t' << num(c.p_value)
        << '\t' << num(c.std_diff) << '\t' << (c.flagged ? 1 : 0) << '\t' << c.note << '\n';
  }
  return out.str();
}

std::string to_json(const MonteCarloReport& report) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "monte_carlo";
  doc["design"] = {{"link", link_name(report.design.link)},
                   {"assignment", assignment_name(report.design.assignment)},
                   {"n", report.design.n},
                   {"reps", report.design.reps},
                   {"seed", report.design.seed},
                   {"b0", report.design.b0},
                   {"bd", report.design.bd},
                   {"bm", report.design.bm},
                   {"bdm", report.design.bdm}};
  ordered_json truths;
  for (const std::string& tag : monte_carlo_tags()) truths[tag] = jnum(report.truths.truth_for(tag));
  doc["oracle"] = {{"draws", report.oracle_draws},
                   {"p_a", jnum(report.truths.p_a)},
                   {"p_c", jnum(report.truths.p_c)},
                   {"p_n", jnum(report.truths.p_n)},
                   {"truths", truths}};
  ordered_json cic_rows = ordered_json::array();
  for (const MonteCarloRow& r : report.cic) cic_rows.push_back(row_json(r));
  ordered_json did_rows = ordered_json::array();
  for (const MonteCarloRow& r : report.did) did_rows.push_back(row_json(r));
  doc["estimators"] = {{"cic", cic_rows}, {"did", did_rows}};
  return dump(doc);
}

std::string to_tsv(const MonteCarloReport& report) {
  std::ostringstream out;
  meta_line(out, "schema_version", kSchemaVersion);
  meta_line(out, "kind", "monte_carlo");
  meta_line(out, "link", link_name(report.design.link));
  meta_line(out, "assignment", assignment_name(report.design.assignment));
  meta_line(out, "n", std::to_string(report.design.n));
  meta_line(out, "reps", std::to_string(report.design.reps));
  meta_line(out, "seed", std::to_string(report.design.seed));
  meta_line(out, "oracle_draws", std::to_string(report.oracle_draws));
  meta_line(out, "p_a", num(report.truths.p_a));
  meta_line(out, "p_c", num(report.truths.p_c));
  meta_line(out, "p_n", num(report.truths.p_n));
  out << "estimator\ttag\ttruth\tbias\tsd\trmse\trelative_rmse\tn_failed\n";
  for (const MonteCarloRow& r : report.cic) row_tsv(out, "cic", r);
  for (const MonteCarloRow& r : report.did) row_tsv(out, "did", r);
  return out.str();
}

std::string error_json(const Error& err) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "error";
  doc["code"] = errc_name(err.code());
  doc["message"] = err.what();
  return doc.dump() + "\n";
}

}  // namespace cic
