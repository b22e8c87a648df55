#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"

#include "cic/bootstrap.hpp"
#include "cic/data.hpp"
#include "cic/diagnostics.hpp"
#include "cic/did.hpp"
#include "cic/errors.hpp"
#include "cic/estimators.hpp"
#include "cic/io.hpp"
#include "cic/report.hpp"
#include "cic/simulation.hpp"

namespace {

struct OutputOpts {
  std::string path;  // empty or "-": stdout
  std::string format = "tsv";
};

void write_output(const OutputOpts& out, const std::string& text) {
  if (out.path.empty() || out.path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(out.path, std::ios::binary);
  if (!file) cic::fail(cic::errc::bad_config, "cannot open output file '" + out.path + "'");
  file << text;
}

void emit_error(const cic::Error& err, const std::string& format) {
  if (format == "json") {
    std::cerr << cic::error_json(err);
  } else {
    std::cerr << "error (" << cic::errc_name(err.code()) << "): " << err.what() << '\n';
  }
}

struct InputOpts {
  std::string input;
  cic::ColumnSpec columns;
  std::string design = "rcs";
};

cic::Dataset load_input(const InputOpts& in) {
  cic::StudyDesign design =
      in.design == "panel" ? cic::StudyDesign::panel : cic::StudyDesign::repeated_cross_section;
  if (in.input == "-") return cic::load_csv(std::cin, in.columns, design);
  return cic::load_csv_file(in.input, in.columns, design);
}

void add_input_options(CLI::App* cmd, InputOpts& in) {
  cmd->add_option("-i,--input", in.input, "CSV file with a header row ('-' reads stdin)")
      ->required()
      ->envname("CIC_INPUT");
  cmd->add_option("--outcome", in.columns.outcome, "Outcome column")->capture_default_str();
  cmd->add_option("--treatment", in.columns.treatment, "Binary treatment column")->capture_default_str();
  cmd->add_option("--mediator", in.columns.mediator, "Binary mediator column")->capture_default_str();
  cmd->add_option("--time", in.columns.time, "Binary period column (0 pre, 1 post)")->capture_default_str();
  cmd->add_option("--cluster", in.columns.cluster,
                  "Sampling-unit column (empty string: each row is its own unit)")->capture_default_str();
  cmd->add_option("--covariates", in.columns.covariates,
                  "Comma-separated numeric columns to residualize out of the outcome")
      ->delimiter(',');
  cmd->add_option("--design", in.design, "Sampling design")->capture_default_str()
      ->check(CLI::IsMember({"panel", "rcs"}))
      ->envname("CIC_DESIGN");
}

void add_output_options(CLI::App* cmd, OutputOpts& out) {
  cmd->add_option("-o,--output", out.path, "Output file (default stdout)")->envname("CIC_OUTPUT");
  cmd->add_option("--format", out.format, "Output format")->capture_default_str()
      ->check(CLI::IsMember({"tsv", "json"}))
      ->envname("CIC_FORMAT");
}

// Restricts a suite to the requested estimands, keeping report order.
cic::EffectSuite filter_suite(cic::EffectSuite suite, const std::vector<std::string>& keep) {
  if (keep.empty()) return suite;
  std::unordered_set<std::string> known(cic::estimand_tags().begin(), cic::estimand_tags().end());
  for (const std::string& tag : keep) {
    if (!known.count(tag))
      cic::fail(cic::errc::bad_config, "unknown estimand '" + tag + "' in --effects");
  }
  std::unordered_set<std::string> wanted(keep.begin(), keep.end());
  std::vector<cic::EffectEstimate> filtered;
  for (cic::EffectEstimate& e : suite.effects) {
    if (wanted.count(e.tag)) filtered.push_back(std::move(e));
  }
  suite.effects = std::move(filtered);
  return suite;
}

struct EstimateOpts {
  InputOpts in;
  OutputOpts out;
  std::vector<std::string> effects;
  std::vector<double> quantiles;
  int bootstrap = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  bool did = false;
};

int run_estimate(const EstimateOpts& o) {
  cic::validate_quantile_grid(o.quantiles);
  cic::Dataset data = load_input(o.in);

  auto suite_for = [&](const cic::Dataset& d, bool* one_sided, std::vector<std::string>* warnings) {
    cic::Dataset adjusted = cic::residualize_covariates(d);
    cic::CellPartition part = cic::partition_cells(adjusted);
    cic::EffectSuite suite = o.did ? cic::did_effects(part, o.quantiles)
                                   : cic::estimate_all(part, o.quantiles);
    if (one_sided) *one_sided = part.one_sided;
    if (warnings) {
      *warnings = part.warnings;
      warnings->insert(warnings->end(), suite.warnings.begin(), suite.warnings.end());
    }
    return filter_suite(std::move(suite), o.effects);
  };

  cic::EstimateReport report;
  report.estimator = o.did ? "did" : "cic";
  report.design = data.design;
  report.n_rows = data.rows.size();
  report.n_clusters = data.n_clusters();
  report.dropped_rows = data.dropped_rows;
  report.suite = suite_for(data, &report.one_sided, &report.warnings);

  if (o.bootstrap > 0) {
    std::vector<cic::CoordinateRef> plan = cic::coordinate_plan(report.suite);
    cic::BootstrapConfig cfg;
    cfg.replicates = o.bootstrap;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cic::BootstrapRun run = cic::cluster_bootstrap(
        data,
        [&](const cic::Dataset& d) {
          return cic::coordinate_values(suite_for(d, nullptr, nullptr), plan);
        },
        cfg);
    report.with_bootstrap = true;
    report.bootstrap_replicates = cfg.replicates;
    report.bootstrap_failed = run.n_failed;
    report.stats = std::move(run.results);
  }

  write_output(o.out, o.out.format == "json" ? cic::to_json(report) : cic::to_tsv(report));
  return 0;
}

struct DiagnoseOpts {
  InputOpts in;
  OutputOpts out;
  int bootstrap = 499;
  std::uint64_t seed = 0;
  int threads = 0;
};

int run_diagnose(const DiagnoseOpts& o) {
  cic::Dataset data = load_input(o.in);
  cic::BootstrapConfig cfg;
  cfg.replicates = o.bootstrap;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  std::vector<cic::DiagnosticResult> checks = cic::run_all_diagnostics(data, cfg);
  write_output(o.out, o.out.format == "json" ? cic::to_json(checks) : cic::to_tsv(checks));
  return 0;
}

struct SimulateOpts {
  OutputOpts out;
  std::string link = "identity";
  std::string assignment = "random";
  std::size_t n = 4000;
  int reps = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::size_t oracle_draws = 1000000;
  double b0 = 1.0, bd = 1.0, bm = 1.0, bdm = 1.0;
};

int run_simulate(const SimulateOpts& o) {
  cic::SimulationDesign design;
  design.link = o.link == "exponential" ? cic::Link::exponential : cic::Link::identity;
  design.assignment =
      o.assignment == "selective" ? cic::Assignment::selective : cic::Assignment::random;
  design.n = o.n;
  design.reps = o.reps;
  design.seed = o.seed;
  design.threads = o.threads;
  design.b0 = o.b0;
  design.bd = o.bd;
  design.bm = o.bm;
  design.bdm = o.bdm;
  cic::MonteCarloReport report = cic::run_monte_carlo(design, o.oracle_draws);
  write_output(o.out, o.out.format == "json" ? cic::to_json(report) : cic::to_tsv(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional decomposition of direct and mediated treatment effects"};
  app.require_subcommand(1);

  EstimateOpts est;
  CLI::App* est_cmd = app.add_subcommand(
      "estimate", "Estimate direct/indirect effects from a two-period dataset");
  add_input_options(est_cmd, est.in);
  est_cmd->add_option("--effects", est.effects, "Comma-separated estimand subset")
      ->delimiter(',');
  est_cmd->add_option("--quantiles", est.quantiles,
                      "Comma-separated quantile levels in (0,1) for distributional effects")
      ->delimiter(',');
  est_cmd->add_option("--bootstrap", est.bootstrap,
                      "Cluster-bootstrap replicates (0 disables inference)")
      ->check(CLI::NonNegativeNumber);
  est_cmd->add_option("--seed", est.seed, "Bootstrap seed")->capture_default_str()->envname("CIC_SEED");
  est_cmd->add_option("--threads", est.threads, "Worker threads (0: all cores)")->capture_default_str()
      ->envname("CIC_THREADS");
  est_cmd->add_flag("--did", est.did, "Use the mean-shift (common-trend) comparator");
  add_output_options(est_cmd, est.out);

  DiagnoseOpts dia;
  CLI::App* dia_cmd =
      app.add_subcommand("diagnose", "Run balance, attrition, and identification checks");
  add_input_options(dia_cmd, dia.in);
  dia_cmd->add_option("--bootstrap", dia.bootstrap, "Replicates for bootstrap-based checks")->capture_default_str()
      ->check(CLI::PositiveNumber);
  dia_cmd->add_option("--seed", dia.seed, "Bootstrap seed")->capture_default_str()->envname("CIC_SEED");
  dia_cmd->add_option("--threads", dia.threads, "Worker threads (0: all cores)")->capture_default_str()
      ->envname("CIC_THREADS");
  add_output_options(dia_cmd, dia.out);

  SimulateOpts sim;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo benchmark of the estimator against oracle effects");
  sim_cmd->add_option("--link", sim.link, "Outcome link")->capture_default_str()
      ->check(CLI::IsMember({"identity", "exponential"}));
  sim_cmd->add_option("--assignment", sim.assignment, "Treatment assignment")->capture_default_str()
      ->check(CLI::IsMember({"random", "selective"}));
  sim_cmd->add_option("--n", sim.n, "Sample size per replication")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--reps", sim.reps, "Monte Carlo replications")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "Simulation seed")->capture_default_str()->envname("CIC_SEED");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0: all cores)")->capture_default_str()
      ->envname("CIC_THREADS");
  sim_cmd->add_option("--oracle-draws", sim.oracle_draws,
                      "Draws for the brute-force truth table")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--b0", sim.b0, "Intercept coefficient")->capture_default_str();
  sim_cmd->add_option("--bd", sim.bd, "Treatment coefficient")->capture_default_str();
  sim_cmd->add_option("--bm", sim.bm, "Mediator coefficient")->capture_default_str();
  sim_cmd->add_option("--bdm", sim.bdm, "Interaction coefficient")->capture_default_str();
  add_output_options(sim_cmd, sim.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string format = "tsv";
  try {
    if (est_cmd->parsed()) {
      format = est.out.format;
      return run_estimate(est);
    }
    if (dia_cmd->parsed()) {
      format = dia.out.format;
      return run_diagnose(dia);
    }
    format = sim.out.format;
    return run_simulate(sim);
  } catch (const cic::Error& e) {
    emit_error(e, format);
    return cic::is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
