#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "cic/data.hpp"
#include "support.hpp"

using nlohmann::json;

namespace {

std::string tmp_dir() {
  const char* dir = std::getenv("CIC_TEST_TMPDIR");
  return dir != nullptr ? dir : "/tmp";
}

std::string cli_bin() {
  const char* bin = std::getenv("CIC_CLI_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "CIC_CLI_BIN must point at the command-line binary");
  return bin;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the binary through the shell so tests exercise the real process
// boundary: argv parsing, exit codes, and the stdout/stderr split.
CmdResult run_cli(const std::string& args, const std::string& stdin_file = "",
                  const std::string& env_prefix = "") {
  static int counter = 0;
  std::string base = tmp_dir() + "/run" + std::to_string(counter++);
  std::string cmd = env_prefix + "\"" + cli_bin() + "\" " + args;
  if (!stdin_file.empty()) cmd += " <" + stdin_file;
  cmd += " >" + base + ".out 2>" + base + ".err";
  int rc = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(base + ".out");
  r.err = slurp(base + ".err");
  return r;
}

std::string write_csv(const cic::Dataset& data, const std::string& name) {
  std::string path = tmp_dir() + "/" + name;
  std::ofstream f(path, std::ios::binary);
  f << "id,y,d,m,t\n";
  char buf[64];
  for (const cic::Observation& o : data.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", o.y);
    f << data.cluster_labels[static_cast<std::size_t>(o.cluster)] << ',' << buf << ','
      << int(o.d) << ',' << int(o.m) << ',' << int(o.t) << '\n';
  }
  return path;
}

std::string two_sided_csv() {
  static std::string path = [] {
    std::mt19937_64 gen(11);
    return write_csv(support::random_dataset(gen), "two_sided.csv");
  }();
  return path;
}

const json& find_effect(const json& doc, const std::string& tag, const std::string& quantity) {
  for (const json& row : doc.at("effects")) {
    if (row.at("tag") == tag && row.at("quantity") == quantity) return row;
  }
  REQUIRE_MESSAGE(false, "no effect row " << tag << "/" << quantity);
  return doc;
}

}  // namespace

TEST_CASE("help text lists the subcommands and exits cleanly") {
  CmdResult r = run_cli("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("estimate") != std::string::npos);
  CHECK(r.out.find("diagnose") != std::string::npos);
  CHECK(r.out.find("simulate") != std::string::npos);

  CHECK(run_cli("estimate --help").code == 0);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("bogus-subcommand").code == 2);
}

TEST_CASE("estimate emits a tab-separated table by default") {
  CmdResult r = run_cli("estimate -i " + two_sided_csv());
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("# kind\testimates\n") != std::string::npos);
  CHECK(r.out.find("# estimator\tcic\n") != std::string::npos);
  CHECK(r.out.find("# design\trcs\n") != std::string::npos);
  CHECK(r.out.find("tag\tquantity\tq\testimate\tse\tp_value\tci_lower\tci_upper\tavailable\tnote")
        != std::string::npos);
  CHECK(r.out.find("theta_n\taverage") != std::string::npos);
  CHECK(r.out.find("ATE\taverage") != std::string::npos);
}

TEST_CASE("json output is byte-stable across reruns and thread counts") {
  std::string flags = "estimate -i " + two_sided_csv() +
                      " --format json --bootstrap 49 --seed 5 --threads ";
  CmdResult first = run_cli(flags + "1");
  CmdResult again = run_cli(flags + "1");
  CmdResult wide = run_cli(flags + "4");
  REQUIRE(first.code == 0);
  CHECK(first.out == again.out);
  CHECK(first.out == wide.out);

  json doc = json::parse(first.out);
  CHECK(doc.at("schema_version") == "1");
  CHECK(doc.at("kind") == "estimates");
  CHECK(doc.at("estimator") == "cic");
  CHECK(doc.at("one_sided") == false);
  CHECK(doc.at("bootstrap").at("replicates") == 49);
  REQUIRE(doc.at("effects").size() == 12);
  const json& row = find_effect(doc, "theta_n", "average");
  CHECK(row.at("available") == true);
  CHECK(row.contains("se"));
  CHECK(row.contains("ci_lower"));
  double pa = doc.at("shares").at("p_a").get<double>();
  double pc = doc.at("shares").at("p_c").get<double>();
  double pn = doc.at("shares").at("p_n").get<double>();
  CHECK(pa + pc + pn == doctest::Approx(1.0));
}

TEST_CASE("structured errors go to stderr with the documented exit codes") {
  CmdResult missing = run_cli("estimate -i " + tmp_dir() + "/no_such.csv --format json");
  CHECK(missing.code == 2);
  CHECK(missing.out.empty());
  json err = json::parse(missing.err);
  CHECK(err.at("kind") == "error");
  CHECK(err.at("code") == "BadConfig");

  std::string bad_path = tmp_dir() + "/bad_code.csv";
  {
    std::ofstream f(bad_path, std::ios::binary);
    f << "id,y,d,m,t\nu1,1.5,2,0,0\nu2,1.0,0,0,1\n";
  }
  CmdResult nonbin = run_cli("estimate -i " + bad_path + " --format json");
  CHECK(nonbin.code == 2);
  CHECK(json::parse(nonbin.err).at("code") == "NonBinaryCode");

  CmdResult badflag = run_cli("estimate -i " + two_sided_csv() + " --design bogus");
  CHECK(badflag.code == 2);

  CmdResult badeffect =
      run_cli("estimate -i " + two_sided_csv() + " --effects theta_x --format json");
  CHECK(badeffect.code == 2);
  CHECK(json::parse(badeffect.err).at("code") == "BadConfig");

  CHECK(run_cli("estimate -i " + two_sided_csv() + " --bootstrap -3").code == 2);
}

TEST_CASE("one-sided designs mark always-taker estimands unavailable") {
  std::mt19937_64 gen(19);
  std::string path = write_csv(support::random_dataset(gen, false, /*one_sided=*/true),
                               "one_sided.csv");
  CmdResult r = run_cli("estimate -i " + path + " --format json");
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc.at("one_sided") == true);
  const json& ta = find_effect(doc, "theta_a", "average");
  CHECK(ta.at("available") == false);
  CHECK_FALSE(ta.at("skip_reason").get<std::string>().empty());
  CHECK(find_effect(doc, "theta_n", "average").at("available") == true);
  CHECK(find_effect(doc, "ATE", "average").at("available") == true);
}

TEST_CASE("the mean-shift comparator is selected by flag") {
  CmdResult r = run_cli("estimate -i " + two_sided_csv() + " --did --format json");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("estimator") == "did");
}

TEST_CASE("quantile levels add one row per level") {
  CmdResult r = run_cli("estimate -i " + two_sided_csv() +
                        " --effects Delta_c --quantiles 0.25,0.5,0.75");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Delta_c\taverage") != std::string::npos);
  CHECK(r.out.find("Delta_c\tquantile\t0.25") != std::string::npos);
  CHECK(r.out.find("Delta_c\tquantile\t0.5") != std::string::npos);
  CHECK(r.out.find("Delta_c\tquantile\t0.75") != std::string::npos);
  CHECK(r.out.find("theta_n") == std::string::npos);

  CmdResult bad = run_cli("estimate -i " + two_sided_csv() + " --quantiles 0.5,1.5");
  CHECK(bad.code == 2);
}

TEST_CASE("stdin is read when the input path is a dash") {
  CmdResult from_file = run_cli("estimate -i " + two_sided_csv());
  CmdResult from_stdin = run_cli("estimate -i -", two_sided_csv());
  REQUIRE(from_stdin.code == 0);
  CHECK(from_stdin.out == from_file.out);
}

TEST_CASE("environment variables supply defaults") {
  CmdResult r = run_cli("estimate -i " + two_sided_csv(), "", "CIC_FORMAT=json ");
  REQUIRE(r.code == 0);
  CHECK(r.out.front() == '{');
  CHECK(json::parse(r.out).at("kind") == "estimates");
}

TEST_CASE("diagnose covers the panel checks end to end") {
  std::vector<support::Row> rows;
  for (int i = 0; i < 48; ++i) {
    int d = i % 2;
    int m = (i / 2) % 2;
    std::string label = "p" + std::to_string(i);
    double base = 0.2 * d + 0.3 * m + 0.5 * std::sin(double(i));
    rows.push_back({label, base, d, m, 0});
    rows.push_back({label, base + 0.4 + 0.01 * i, d, m, 1});
  }
  std::string path = write_csv(support::make_dataset(rows, cic::StudyDesign::panel),
                               "panel.csv");
  CmdResult r = run_cli("diagnose -i " + path + " --design panel --bootstrap 59 --seed 4");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# kind\tdiagnostics") != std::string::npos);
  CHECK(r.out.find("balance_pre") != std::string::npos);
  CHECK(r.out.find("pretrend_implication") != std::string::npos);
  CHECK(r.out.find("clusters observed in both periods") != std::string::npos);

  CmdResult j = run_cli("diagnose -i " + path +
                        " --design panel --bootstrap 59 --seed 4 --format json");
  REQUIRE(j.code == 0);
  json doc = json::parse(j.out);
  CHECK(doc.at("kind") == "diagnostics");
  CHECK(doc.at("checks").size() == 8);
}

TEST_CASE("simulate reports oracle truths next to both estimator panels") {
  CmdResult r = run_cli(
      "simulate --n 400 --reps 12 --oracle-draws 60000 --seed 2 --threads 2 --format json");
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc.at("kind") == "monte_carlo");
  CHECK(doc.at("design").at("link") == "identity");
  CHECK(doc.at("oracle").at("truths").at("theta_n") == 1.0);
  CHECK(doc.at("oracle").at("truths").at("Delta_c") == 3.0);
  CHECK(doc.at("estimators").at("cic").size() == 9);
  CHECK(doc.at("estimators").at("did").size() == 9);

  CmdResult out_file = run_cli("simulate --n 200 --reps 5 --oracle-draws 40000 --seed 3 -o " +
                               tmp_dir() + "/sim.tsv");
  REQUIRE(out_file.code == 0);
  CHECK(out_file.out.empty());
  std::string body = slurp(tmp_dir() + "/sim.tsv");
  CHECK(body.find("# kind\tmonte_carlo") != std::string::npos);
  CHECK(body.find("estimator\ttag\ttruth\tbias\tsd\trmse") != std::string::npos);
}
