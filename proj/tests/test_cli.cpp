// End-to-end checks of the command-line tool: each subcommand is exercised
// through a real process, and outputs are parsed back from disk.
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "cenobreak/sha256.hpp"
#include "doctest.h"
#include "json.hpp"
#include "testutil.hpp"

using json = nlohmann::json;
using testutil::TempDir;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const TempDir& dir, const std::string& args,
                  const std::string& env_prefix = "") {
  static int counter = 0;
  const std::string out_path = dir.file("cli_stdout_" + std::to_string(counter));
  const std::string err_path = dir.file("cli_stderr_" + std::to_string(counter));
  ++counter;
  std::string cmd = env_prefix.empty() ? std::string() : env_prefix + " ";
  cmd += "'";
  cmd += CENOBREAK_CLI_PATH;
  cmd += "' " + args + " > '" + out_path + "' 2> '" + err_path + "'";
  const int status = std::system(cmd.c_str());
  CliResult res;
  if (status != -1 && WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  res.out = testutil::read_text(out_path);
  res.err = testutil::read_text(err_path);
  return res;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// 600 observations on an exact 25 kyr grid from 15.000 to 0.025 Ma; the
/// value steps from 4 down to 1 at 7.5 Ma with sd-0.1 deterministic noise.
std::string make_raw_tsv(const TempDir& dir) {
  const std::vector<double> noise = testutil::normal_draws(600, 77, 0.1);
  std::string text = "age_Ma\td18O_corr\n";
  for (int j = 0; j < 600; ++j) {
    const double age = 15.0 - 0.025 * j;
    const double value = (age > 7.5 ? 4.0 : 1.0) + noise[static_cast<std::size_t>(j)];
    text += fmt(age) + "\t" + fmt(value) + "\n";
  }
  const std::string path = dir.file("data.tsv");
  testutil::write_text(path, text);
  return path;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

/// Drops comment lines that embed run metadata, keeping payload lines only.
std::string without_meta_lines(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    if (line.rfind("# meta:", 0) != 0) {
      out += line;
      out += '\n';
    }
    pos = nl + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("cli: ingest reports audit, gaps, and the input checksum") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);
  const CliResult res = run_cli(dir, "ingest --input " + quoted(data));
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["meta"]["tool"] == "cenobreak");
  CHECK(j["meta"]["input_sha256"] == cenobreak::Sha256::of_file(data));
  CHECK(j["meta"]["config"]["command"] == "ingest");
  CHECK(j["audit"]["rows_total"] == 600);
  CHECK(j["audit"]["rows_kept"] == 600);
  CHECK(j["audit"]["detected_delimiter"] == "\t");
  CHECK(j["gaps"]["n_obs"] == 600);
  CHECK(std::fabs(j["gaps"]["mean_gap_kyr"].get<double>() - 25.0) < 1e-9);
  CHECK(j["gaps"]["duplicate_instances"] == 0);
}

TEST_CASE("cli: bin writes a tagged series file that estimate can consume") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);
  const std::string binned = dir.file("binned.csv");
  const CliResult bin_res =
      run_cli(dir, "bin --input " + quoted(data) + " --bin-kyr 25 --out " + quoted(binned));
  REQUIRE(bin_res.exit_code == 0);
  const std::string content = testutil::read_text(binned);
  CHECK(content.rfind("# cenobreak-binned-v1", 0) == 0);
  const json summary = json::parse(bin_res.out);
  REQUIRE(summary["written"].size() == 1);
  CHECK(summary["written"][0]["bins"] == 600);
  CHECK(summary["written"][0]["path"] == binned);
  CHECK(std::fabs(summary["written"][0]["mean"].get<double>() - 2.5) < 0.02);

  const CliResult est = run_cli(
      dir, "estimate --input " + quoted(binned) + " --binned --spec mean --m 1");
  REQUIRE(est.exit_code == 0);
  const json j = json::parse(est.out);
  CHECK(j["series"]["bins"] == 600);
  CHECK(j["series"]["bin_kyr"] == 25.0);
  const json& fit = j["fit"];
  CHECK(fit["m"] == 1);
  CHECK(fit["converged"] == true);
  CHECK(fit["sample_rows"] == 600);
  REQUIRE(fit["segments"].size() == 2);
  REQUIRE(fit["breaks"].size() == 1);
  const double age = fit["breaks"][0]["age_ma"].get<double>();
  CHECK(std::fabs(age - 7.525) < 0.06);
  const json& ci = fit["breaks"][0]["ci"];
  REQUIRE(ci["unbounded"] == false);
  CHECK(ci["older_age_ma"].get<double>() >= age);
  CHECK(ci["younger_age_ma"].get<double>() <= age);
  // Oldest regime sits near level 4, youngest near level 1.
  CHECK(fit["segments"][0]["delta"][0].get<double>() > 3.5);
  CHECK(fit["segments"][1]["delta"][0].get<double>() < 1.5);
}

TEST_CASE("cli: select identifies the single break and writes the IC table") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);
  const std::string table = dir.file("table.csv");
  const CliResult res = run_cli(dir, "select --input " + quoted(data) +
                                         " --bin-kyr 25 --spec mean --m-max 3 --table " +
                                         quoted(table));
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  REQUIRE(j["table"].size() == 4);
  CHECK(j["selected"]["bic"] == 1);
  CHECK(j["selected"]["lwz"] == 1);
  CHECK(j.contains("kt_selected"));
  REQUIRE(j["selected_break_ages_ma"]["bic"].size() == 1);
  CHECK(std::fabs(j["selected_break_ages_ma"]["bic"][0].get<double>() - 7.525) < 0.06);
  // SSR strictly drops from m = 0 to the true single break.
  CHECK(j["table"][1]["ssr"].get<double>() < 0.2 * j["table"][0]["ssr"].get<double>());

  const std::string csv = testutil::read_text(table);
  CHECK(csv.find("m,ssr,bic,lwz,kt\n") != std::string::npos);
  CHECK(csv.find("\n0,") != std::string::npos);  // one row per break count
  CHECK(csv.find("\n3,") != std::string::npos);
}

TEST_CASE("cli: adf runs on full and age-restricted samples") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);
  const CliResult full = run_cli(dir, "adf --input " + quoted(data) + " --bin-kyr 25");
  REQUIRE(full.exit_code == 0);
  const json j = json::parse(full.out);
  CHECK(j["sample"]["n"] == 600);
  const int lag = j["adf"]["lag_order"].get<int>();
  CHECK(lag >= 0);
  CHECK(lag <= 18);  // floor(12 (600/100)^{1/4})
  CHECK(j["adf"]["nobs"] == 600 - 1 - lag);
  CHECK(j["adf"]["critical_value_1pct"].get<double>() < -3.43);
  CHECK(j["adf"]["reject_at_1pct"].is_boolean());

  const CliResult part = run_cli(
      dir, "adf --input " + quoted(data) + " --bin-kyr 25 --older-ma 10 --younger-ma 2.5");
  REQUIRE(part.exit_code == 0);
  const json p = json::parse(part.out);
  CHECK(p["sample"]["n"] == 300);
  CHECK(p["sample"]["older_ma"] == 10.0);
  CHECK(p["sample"]["younger_ma"] == 2.5);

  const CliResult bad = run_cli(
      dir, "adf --input " + quoted(data) + " --older-ma 2 --younger-ma 3");
  CHECK(bad.exit_code == 1);
  CHECK(json::parse(bad.err)["error"]["code"] == "runtime");
}

TEST_CASE("cli: simulate reruns are byte-identical") {
  TempDir dir;
  const std::string prefix = dir.file("study");
  const std::string args = "simulate --dgp 2 --t 200 --break-at 100 --reps 3 --seed 7 "
                           "--min-len 25 --out " +
                           quoted(prefix);
  REQUIRE(run_cli(dir, args).exit_code == 0);
  const std::string reps1 = testutil::read_text(prefix + "_replications.csv");
  const std::string summ1 = testutil::read_text(prefix + "_summary.json");
  const std::string dens1 = testutil::read_text(prefix + "_density.csv");
  REQUIRE_FALSE(reps1.empty());
  REQUIRE_FALSE(summ1.empty());
  REQUIRE_FALSE(dens1.empty());

  REQUIRE(run_cli(dir, args).exit_code == 0);
  CHECK(testutil::read_text(prefix + "_replications.csv") == reps1);
  CHECK(testutil::read_text(prefix + "_summary.json") == summ1);
  CHECK(testutil::read_text(prefix + "_density.csv") == dens1);

  const json summary = json::parse(summ1);
  CHECK(summary["aggregates"]["replications"] == 3);
  CHECK(summary["aggregates"]["true_break"] == 100);
  CHECK_FALSE(summary["files"]["density"].is_null());
  CHECK(reps1.find("rep,ok,error,breaks,m_bic,m_lwz,m_kt,ci_lower,ci_upper,"
                   "ci_unbounded,covered\n") != std::string::npos);
}

TEST_CASE("cli: invalid invocations produce structured errors") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);

  const CliResult bad_flag = run_cli(
      dir, "estimate --input " + quoted(data) + " --m 1 --definitely-not-a-flag");
  CHECK(bad_flag.exit_code != 0);
  CHECK(json::parse(bad_flag.err)["error"]["code"] == "config");

  const CliResult missing = run_cli(dir, "ingest --input " + quoted(dir.file("no.tsv")));
  CHECK(missing.exit_code == 1);
  CHECK(json::parse(missing.err)["error"]["code"] == "runtime");

  const CliResult bad_dgp =
      run_cli(dir, "simulate --dgp 11 --out " + quoted(dir.file("x")));
  CHECK(bad_dgp.exit_code != 0);
  CHECK(json::parse(bad_dgp.err)["error"]["code"] == "config");

  const CliResult no_m = run_cli(dir, "estimate --input " + quoted(data));
  CHECK(no_m.exit_code != 0);
  CHECK(json::parse(no_m.err)["error"]["code"] == "config");
}

TEST_CASE("cli: reversing a binned series twice restores its payload") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);
  const std::string binned = dir.file("b.csv");
  REQUIRE(run_cli(dir, "bin --input " + quoted(data) + " --bin-kyr 25 --out " +
                           quoted(binned))
              .exit_code == 0);
  const std::string rev = dir.file("rev.csv");
  const std::string rev2 = dir.file("rev2.csv");
  REQUIRE(run_cli(dir, "reverse --input " + quoted(binned) + " --out " + quoted(rev))
              .exit_code == 0);
  REQUIRE(run_cli(dir, "reverse --input " + quoted(rev) + " --out " + quoted(rev2))
              .exit_code == 0);

  const std::string first = testutil::read_text(rev);
  CHECK(first.find("\"reversed\":true") != std::string::npos);
  CHECK(without_meta_lines(testutil::read_text(rev2)) ==
        without_meta_lines(testutil::read_text(binned)));
}

TEST_CASE("cli: estimate emits plot-ready data files") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);
  const std::string prefix = dir.file("plot");
  const CliResult res = run_cli(dir, "estimate --input " + quoted(data) +
                                         " --bin-kyr 25 --spec mean --m 1 --plot-data " +
                                         quoted(prefix));
  REQUIRE(res.exit_code == 0);
  for (const char* suffix : {"_series.csv", "_breaks.csv", "_reference.csv"}) {
    const std::string content = testutil::read_text(prefix + suffix);
    CAPTURE(suffix);
    CHECK_FALSE(content.empty());
  }
  // Default reference markers: five canonical boundary ages.
  const std::string refs = without_meta_lines(testutil::read_text(prefix + "_reference.csv"));
  CHECK(refs.find("13.9") != std::string::npos);
  CHECK(refs.find("3.3") != std::string::npos);
}

TEST_CASE("cli: relative inputs fall back to the data-directory variable") {
  TempDir dir;
  make_raw_tsv(dir);  // writes <dir>/data.tsv
  const CliResult res = run_cli(dir, "ingest --input data.tsv",
                                "CENOBREAK_DATA_DIR='" + dir.path.string() + "'");
  REQUIRE(res.exit_code == 0);
  CHECK(json::parse(res.out)["audit"]["rows_kept"] == 600);
}

TEST_CASE("cli: the kernel override is honored and recorded") {
  TempDir dir;
  const std::string data = make_raw_tsv(dir);
  const CliResult res = run_cli(
      dir, "--kernel scalar estimate --input " + quoted(data) + " --bin-kyr 25 --m 1");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["meta"]["config"]["kernel"] == "scalar");
  CHECK(j["fit"]["m"] == 1);
}
