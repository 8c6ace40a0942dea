#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "plvote/common.hpp"

using namespace plvote;
using namespace plvote::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plvote_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

CsvRow sample_row() {
  CsvRow r;
  r.rule = "copeland";
  r.m = 3;
  r.beta = 30.0;
  r.n = 1000;
  r.trials = 4;
  r.seed = 12345678901234567ull;
  r.population_distortion = 14.251239136874538;
  r.empirical_mean = 0.1 + 0.2;
  r.ci_lo = 0.25;
  r.ci_hi = 0.35;
  r.ub = 30.000000000005617;
  r.lb = 27.0;
  r.satisfied = true;
  r.version = "1.0.0";
  return r;
}

}  // namespace

TEST_CASE("CSV rows round-trip exactly") {
  CsvRow a = sample_row();
  CsvRow b = sample_row();
  b.rule = "plurality_veto";
  b.population_distortion.reset();
  b.empirical_mean = INFINITY;
  b.ci_lo.reset();
  b.ci_hi.reset();
  b.ub.reset();
  b.satisfied.reset();
  b.status = "ok; unbounded (numerator 1)";
  const std::string text = std::string(kCsvHeader) + "\n" + csv_line(a) + "\n" + csv_line(b) + "\n";
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].seed == a.seed);
  CHECK(*rows[0].population_distortion == *a.population_distortion);
  CHECK(*rows[0].empirical_mean == *a.empirical_mean);
  CHECK(*rows[0].ub == *a.ub);
  CHECK(rows[0].satisfied == true);
  CHECK(std::isinf(*rows[1].empirical_mean));
  CHECK_FALSE(rows[1].population_distortion);
  CHECK_FALSE(rows[1].satisfied);
  CHECK(rows[1].status == b.status);
  CHECK(csv_line(b).find(",inf,") != std::string::npos);
}

TEST_CASE("free-text fields cannot break the row structure") {
  CsvRow r = sample_row();
  r.status = "error: a, b\nc";
  const auto rows = parse_csv(std::string(kCsvHeader) + "\n" + csv_line(r) + "\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "error: a; b;c");
}

TEST_CASE("malformed CSV names the row") {
  const std::string good = csv_line(sample_row());
  const std::string header = kCsvHeader;
  auto message = [](const std::string& text) {
    try {
      parse_csv(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("rule,m\n").find("row 1") != std::string::npos);
  CHECK(message(header + "\n" + good + "\ncopeland,3\n").find("row 3") != std::string::npos);
  std::string bad = good;
  bad.replace(bad.find(",30,"), 4, ",x,");
  CHECK(message(header + "\n" + bad + "\n").find("row 2: column beta") != std::string::npos);
  CHECK(parse_csv("").empty());
  CHECK(parse_csv(header + "\n").empty());
}

TEST_CASE("SVG rendering") {
  const std::string empty = render_svg({}, "empty");
  CHECK(empty.find("warning: no data rows") != std::string::npos);
  CHECK(empty.find("<svg") != std::string::npos);

  std::vector<CsvRow> rows;
  for (double beta : {10.0, 20.0, 30.0}) {
    CsvRow r = sample_row();
    r.beta = beta;
    r.empirical_mean = beta / 2;
    r.ub = beta;
    r.lb = 0.9 * beta;
    rows.push_back(r);
  }
  CsvRow unbounded = sample_row();
  unbounded.rule = "plurality_veto";
  unbounded.empirical_mean = INFINITY;
  rows.push_back(unbounded);
  CsvRow failed = sample_row();
  failed.rule = "bogus";
  failed.status = "error: unknown rule";
  rows.push_back(failed);

  const std::string svg = render_svg(rows, "sweep");
  CHECK(svg.find("stroke-dasharray=\"6 4\" points") != std::string::npos);  // upper bound curve
  CHECK(svg.find("stroke-dasharray=\"2 3\" points") != std::string::npos);  // lower bound curve
  CHECK(svg.find("class=\"clipped\"") != std::string::npos);
  CHECK(svg.find("unbounded") != std::string::npos);
  CHECK(svg.find(">bogus<") == std::string::npos);
  CHECK(svg.find("warning") == std::string::npos);
}

TEST_CASE("manifest validation") {
  const fs::path dir = scratch_dir("manifest");
  using nlohmann::json;
  const json ok = {{"id", "x"}, {"instance", {{"construct", "rd"}, {"params", {{"m", 4}, {"beta", 2.0}}}}},
                   {"rules", {"plurality"}}};
  CHECK_NOTHROW(parse_manifest(ok, dir));
  json typo = ok;
  typo["trails"] = 5;
  CHECK_THROWS_AS(parse_manifest(typo, dir), InputError);
  json missing = ok;
  missing["instance"] = {{"path", "nowhere.json"}};
  CHECK_THROWS_AS(parse_manifest(missing, dir), InputError);
  json no_rules = ok;
  no_rules["rules"] = json::array();
  CHECK_THROWS_AS(parse_manifest(no_rules, dir), InputError);
  CHECK_THROWS_AS(construct_family("spoiler", json::object()), InputError);
  CHECK_THROWS_AS(construct_family("rd", {{"beta", 2.0}, {"betta", 1.0}}), InputError);
  CHECK_THROWS_AS(construct_family("copeland", {{"beta", 30.0}, {"epsilon", 0.3}}), PreconditionError);
}

TEST_CASE("runs record row-level failures and are reproducible") {
  using nlohmann::json;
  const json j = {{"id", "sweep"},
                  {"instance", {{"construct", "rd"}, {"params", {{"m", 4}, {"epsilon", 0.1}}}}},
                  {"rules", {"random_dictator", "no_such_rule", "plurality_veto"}},
                  {"beta_grid", {0.5, 2.0, 4.0}},
                  {"n", 500},
                  {"trials", 3},
                  {"seed", 11}};
  const Manifest mf = parse_manifest(j, ".");
  const RunResult a = run_manifest(mf, {});
  REQUIRE(a.rows.size() == 9);
  // beta = 0.5 is rejected by the instance: every rule of that grid point fails.
  for (int i = 0; i < 3; ++i) CHECK(a.rows[i].status.rfind("error", 0) == 0);
  CHECK(a.rows[4].status == "error: unknown rule 'no_such_rule'");
  CHECK(a.rows[3].status == "ok");
  CHECK(a.rows[3].population_distortion.has_value());
  CHECK(a.rows[3].satisfied == true);
  CHECK_FALSE(a.rows[5].population_distortion);  // veto rules have no population path
  CHECK(a.failed_rows == 5);
  CHECK(a.record.at("rows").size() == 9);

  const RunResult b = run_manifest(mf, {});
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(csv_line(a.rows[i]) == csv_line(b.rows[i]));

  RunOptions other;
  other.seed = 99;
  other.seed_override = true;
  const RunResult c = run_manifest(mf, other);
  CHECK(c.rows[3].seed == 99);
  CHECK(*c.rows[3].population_distortion == *a.rows[3].population_distortion);
}

TEST_CASE("command line exit codes and outputs") {
  const fs::path dir = scratch_dir("commands");
  const std::string out = dir.string();
  CHECK(cli_main({"--out", out, "construct", "copeland", "--beta", "30", "--epsilon", "0.1"}) == kOk);
  CHECK(fs::exists(dir / "copeland_instance.json"));
  CHECK(fs::exists(dir / "copeland_report.json"));
  CHECK(cli_main({"--out", out, "construct", "copeland", "--beta", "30", "--epsilon", "0.3"}) == kUsage);
  CHECK(cli_main({"--out", out, "construct", "tournament", "--rho", "0.05", "--epsilon", "0.1", "--gamma", "0.01",
                  "--beta", "auto"}) == kOk);
  const auto report = nlohmann::json::parse(slurp(dir / "tournament_report.json"));
  CHECK(report.at("internal_params").at("beta0") == report.at("internal_params").at("beta"));
  CHECK(cli_main({"--out", out, "construct", "tournament", "--beta", "fast"}) == kUsage);
  CHECK(cli_main({"construct"}) == kUsage);
  CHECK(cli_main({}) == kUsage);
  CHECK(cli_main({"--threads", "-1", "bounds", "--beta", "2"}) == kUsage);
  CHECK(cli_main({"bounds", "--beta", "2", "5", "--m", "4"}) == kOk);
  CHECK(cli_main({"verify", "sigmoid"}) == kOk);
  CHECK(cli_main({"verify", "1"}) == kOk);
  CHECK(cli_main({"verify", "no-such-suite"}) == kUsage);

  // Manifest runs write CSV and a JSON record; a failing row gives exit 1.
  nlohmann::json mf = {{"id", "cli_run"},
                       {"instance", {{"path", "copeland_instance.json"}}},
                       {"rules", {"copeland", "plurality"}},
                       {"n", 200},
                       {"trials", 2}};
  std::ofstream(dir / "good.json") << mf.dump();
  CHECK(cli_main({"--out", out, "run", (dir / "good.json").string()}) == kOk);
  CHECK(fs::exists(dir / "cli_run.csv"));
  CHECK(fs::exists(dir / "cli_run.run.json"));
  mf["rules"].push_back("approval");
  mf["id"] = "cli_run_bad";
  std::ofstream(dir / "bad.json") << mf.dump();
  CHECK(cli_main({"--out", out, "run", (dir / "bad.json").string()}) == kCheckFailure);

  CHECK(cli_main({"--out", out, "report", (dir / "cli_run.csv").string()}) == kOk);
  CHECK(slurp(dir / "cli_run.svg").find("<svg") != std::string::npos);
  std::ofstream(dir / "broken.csv") << kCsvHeader << "\nfoo,1\n";
  CHECK(cli_main({"--out", out, "report", (dir / "broken.csv").string()}) == kUsage);

  CHECK(cli_main({"--out", out, "sample", "--instance", (dir / "copeland_instance.json").string(), "--n", "25"}) ==
        kOk);
  const std::string profile = slurp(dir / "profile.csv");
  CHECK(std::count(profile.begin(), profile.end(), '\n') == 26);
  CHECK(cli_main({"--out", out, "sample", "--n", "5"}) == kUsage);
}
