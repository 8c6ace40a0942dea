#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "plvote/distortion.hpp"
#include "plvote/profile.hpp"
#include "plvote/verify.hpp"

namespace plvote::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 20250101;
  std::string out = "out";
  int threads = 0;
  double tolerance = 1e-9;
  bool seed_given = false;
  bool out_given = false;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string fixed(double x, int digits = 6) {
  if (std::isinf(x)) return "inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Construction parameters shared by `construct` and `sample`.
struct FamilyArgs {
  std::string family;
  std::optional<int> m;
  std::string beta;  // number or "auto"
  std::optional<double> epsilon, rho, gamma;

  void attach(CLI::App* sub, bool positional) {
    if (positional) sub->add_option("family", family, "rd, plurality, plurality_veto, copeland, tournament")->required();
    else sub->add_option("--construct", family, "construction family to sample from");
    sub->add_option("--m", m, "number of candidates");
    sub->add_option("--beta", beta, "inverse temperature, or auto (tournament)");
    sub->add_option("--epsilon", epsilon, "slack parameter");
    sub->add_option("--rho", rho, "coarsening precision (tournament)");
    sub->add_option("--gamma", gamma, "margin gap (tournament)");
  }

  json params() const {
    json p = json::object();
    if (m) p["m"] = *m;
    if (!beta.empty()) {
      if (beta == "auto") {
        p["beta"] = "auto";
      } else {
        try {
          std::size_t used = 0;
          p["beta"] = std::stod(beta, &used);
          if (used != beta.size()) throw std::invalid_argument(beta);
        } catch (const std::exception&) {
          throw InputError("--beta must be a number or 'auto', got '" + beta + "'");
        }
      }
    }
    if (epsilon) p["epsilon"] = *epsilon;
    if (rho) p["rho"] = *rho;
    if (gamma) p["gamma"] = *gamma;
    return p;
  }
};

int cmd_construct(const Globals& g, const FamilyArgs& fa) {
  const ConstructionReport r = construct_family(fa.family, fa.params());
  const fs::path dir = g.out;
  fs::create_directories(dir);
  const fs::path inst_path = dir / (fa.family + "_instance.json");
  const fs::path report_path = dir / (fa.family + "_report.json");
  write_text(inst_path, to_json(r.instance).dump(2) + "\n");
  write_text(report_path, to_json(r).dump(2) + "\n");

  std::cout << "family               " << r.family << "\n"
            << "m, beta              " << r.instance.m << ", " << fixed(r.instance.beta) << "\n"
            << "target rule          " << r.target_rule << "\n"
            << "predicted outcome    " << r.predicted_outcome << "\n"
            << "population distortion " << fixed(r.population_distortion) << "\n"
            << "closed form          " << fixed(r.closed_form_distortion) << "\n"
            << "lower bound          " << fixed(r.lower_bound) << "\n";
  for (const auto& [k, v] : r.params) std::cout << "  param " << k << " = " << fixed(v, 10) << "\n";
  for (const auto& [k, v] : r.flags) std::cout << "  flag  " << k << " = " << (v ? "true" : "false") << "\n";
  std::cout << "wrote " << inst_path.string() << " and " << report_path.string() << "\n";
  if (!r.all_flags()) {
    std::cerr << "validity check failed for the constructed instance\n";
    return kCheckFailure;
  }
  return kOk;
}

int cmd_run(const Globals& g, const std::string& manifest_path) {
  const Manifest mf = load_manifest(manifest_path);
  RunOptions opt;
  opt.seed = g.seed;
  opt.seed_override = g.seed_given;
  opt.tolerance = g.tolerance;
  const RunResult res = run_manifest(mf, opt);

  const fs::path dir = g.out_given ? fs::path(g.out) : fs::path(mf.out.value_or(g.out));
  fs::create_directories(dir);
  write_csv(dir / (mf.id + ".csv"), res.rows);
  write_text(dir / (mf.id + ".run.json"), res.record.dump(2) + "\n");

  std::size_t violated = 0;
  for (const auto& r : res.rows) {
    std::cout << r.rule << " beta=" << fixed(r.beta) << " : ";
    if (r.status.rfind("error", 0) == 0) {
      std::cout << r.status << "\n";
      continue;
    }
    std::cout << "empirical " << (r.empirical_mean ? fixed(*r.empirical_mean) : "-") << ", population "
              << (r.population_distortion ? fixed(*r.population_distortion) : "-") << ", ub "
              << (r.ub ? fixed(*r.ub) : "-") << ", lb " << (r.lb ? fixed(*r.lb) : "-");
    if (r.satisfied) std::cout << (*r.satisfied ? " [within ub]" : " [EXCEEDS ub]");
    if (r.status != "ok") std::cout << " (" << r.status << ")";
    std::cout << "\n";
    violated += r.satisfied == false;
  }
  std::cout << "wrote " << (dir / (mf.id + ".csv")).string() << " and " << (dir / (mf.id + ".run.json")).string()
            << "\n";
  if (res.failed_rows > 0) std::cerr << res.failed_rows << " row(s) failed\n";
  if (violated > 0) std::cerr << violated << " row(s) exceed the upper bound\n";
  return res.failed_rows > 0 || violated > 0 ? kCheckFailure : kOk;
}

int cmd_report(const Globals& g, const std::vector<std::string>& csvs) {
  fs::create_directories(g.out);
  for (const auto& path : csvs) {
    std::vector<CsvRow> rows;
    try {
      rows = parse_csv(read_text(path));
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.what());
    }
    const std::string stem = fs::path(path).stem().string();
    const fs::path svg = fs::path(g.out) / (stem + ".svg");
    write_text(svg, render_svg(rows, stem));
    if (rows.empty()) std::cerr << "warning: " << path << " has no data rows\n";
    std::cout << "wrote " << svg.string() << "\n";
  }
  return kOk;
}

int cmd_verify(const Globals& g, const std::string& key, std::optional<double> beta,
               std::optional<std::size_t> samples) {
  std::vector<verify::SuiteInfo> todo;
  if (key == "all") {
    todo = verify::suites();
  } else if (const auto s = verify::find_suite(key)) {
    todo.push_back(*s);
  } else {
    std::string names;
    for (const auto& s : verify::suites()) names += " " + s.name;
    throw InputError("unknown suite '" + key + "'; available: all" + names);
  }
  verify::Options opt;
  opt.seed = g.seed;
  opt.beta = beta;
  opt.samples = samples;
  bool all_pass = true;
  for (const auto& info : todo) {
    const auto res = verify::run_suite(info.name, opt);
    std::cout << "== " << info.criterion << ". " << res.title << " (" << info.name << ")\n";
    std::size_t width = 5;
    for (const auto& c : res.checks) width = std::max(width, c.name.size());
    for (const auto& c : res.checks) {
      std::cout << "  " << (c.pass ? "pass " : "FAIL ") << c.name << std::string(width - c.name.size() + 2, ' ')
                << "expected " << c.expected << " | observed " << c.observed << "\n";
    }
    std::cout << "  => " << (res.passed() ? "PASS" : "FAIL") << " in " << fixed(res.seconds, 3) << " s\n";
    all_pass = all_pass && res.passed();
  }
  return all_pass ? kOk : kCheckFailure;
}

int cmd_sample(const Globals& g, const FamilyArgs& fa, const std::string& instance_path, std::size_t n,
               std::uint64_t trial) {
  Instance inst;
  if (!instance_path.empty()) {
    if (!fa.family.empty()) throw InputError("give either --instance or --construct, not both");
    inst = load_instance(instance_path);
    if (!fa.beta.empty()) inst.beta = fa.params().at("beta").get<double>();
    inst.validate();
  } else if (!fa.family.empty()) {
    inst = construct_family(fa.family, fa.params()).instance;
  } else {
    throw InputError("sample needs --instance or --construct");
  }
  if (n < 1) throw InputError("--n must be >= 1");
  auto profile = std::make_shared<const Profile>(sample_profile(inst, n, g.seed, trial));
  const TallyStats t = tally(profile);

  fs::create_directories(g.out);
  std::ostringstream csv;
  csv << "voter";
  for (int k = 1; k <= inst.m; ++k) csv << ",rank_" << k;
  csv << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv << i;
    for (auto c : profile->ranking(i)) csv << ',' << c;
    csv << "\n";
  }
  const fs::path csv_path = fs::path(g.out) / "profile.csv";
  const fs::path json_path = fs::path(g.out) / "profile_summary.json";
  write_text(csv_path, csv.str());
  const json summary = {{"m", inst.m},           {"n", n},
                        {"beta", inst.beta},     {"seed", g.seed},
                        {"trial", trial},        {"version", version()},
                        {"top_counts", t.top_counts}, {"bottom_counts", t.bottom_counts},
                        {"pair_counts", t.pair_counts}};
  write_text(json_path, summary.dump(2) + "\n");

  std::cout << "candidate  top share  bottom share\n";
  for (int j = 0; j < inst.m; ++j)
    std::cout << "  " << j << "        " << fixed(t.t(j), 5) << "    " << fixed(t.b(j), 5) << "\n";
  std::cout << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
  return kOk;
}

int cmd_bounds(const std::vector<double>& betas, int m, double epsilon) {
  std::cout << "rule                    beta        m   upper bound     lower bound     pclc ratio\n";
  for (double beta : betas) {
    for (Rule r : {Rule::Plurality, Rule::Borda, Rule::Copeland, Rule::PluralityVeto, Rule::PrunedPluralityVeto,
                   Rule::RandomDictator}) {
      const BoundReport b = tabulated_bounds(r, beta, m, epsilon);
      char line[160];
      std::snprintf(line, sizeof line, "%-22s  %-10s  %-3d %-15s %-15s %s\n", b.rule.c_str(), fixed(beta).c_str(), m,
                    b.upper_bound ? fixed(*b.upper_bound).c_str() : "-",
                    b.lower_bound ? (fixed(*b.lower_bound) + (b.lower_bound_asymptotic ? " (asym.)" : "")).c_str()
                                  : "-",
                    fixed(b.pclc_bound).c_str());
      std::cout << line;
    }
  }
  return kOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Plackett-Luce voting distortion toolkit"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "master seed")->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--out", g.out, "output directory")->each([&](const std::string&) { g.out_given = true; });
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--tolerance", g.tolerance, "relative slack when comparing distortion with upper bounds")
      ->check(CLI::NonNegativeNumber);

  FamilyArgs construct_args;
  auto* construct = app.add_subcommand("construct", "build a lower-bound instance and its report");
  construct_args.attach(construct, true);

  std::string manifest;
  auto* run = app.add_subcommand("run", "run an experiment manifest; writes CSV and a JSON run record");
  run->add_option("manifest", manifest, "manifest JSON file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> csvs;
  auto* report = app.add_subcommand("report", "render result CSV files as SVG charts");
  report->add_option("csv", csvs, "result CSV files")->required()->check(CLI::ExistingFile);

  std::string suite;
  std::optional<double> verify_beta;
  std::optional<std::size_t> verify_samples;
  auto* verify = app.add_subcommand("verify", "run an acceptance suite by name, number or 'all'");
  verify->add_option("suite", suite, "suite name")->required();
  verify->add_option("--beta", verify_beta, "override the suite's beta");
  verify->add_option("--samples", verify_samples, "override sweep sizes");

  FamilyArgs sample_args;
  std::string sample_instance;
  std::size_t sample_n = 1000;
  std::uint64_t sample_trial = 0;
  auto* sample = app.add_subcommand("sample", "draw and dump one profile");
  sample->add_option("--instance", sample_instance, "instance JSON file")->check(CLI::ExistingFile);
  sample_args.attach(sample, false);
  sample->add_option("--n", sample_n, "number of voters");
  sample->add_option("--trial", sample_trial, "trial index for the seed stream");

  std::vector<double> bound_betas;
  int bound_m = 3;
  double bound_eps = 0.1;
  auto* bounds = app.add_subcommand("bounds", "print tabulated distortion bounds");
  bounds->add_option("--beta", bound_betas, "one or more beta values")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--m", bound_m, "number of candidates")->check(CLI::Range(2, 1 << 16));
  bounds->add_option("--epsilon", bound_eps, "slack in the lower-bound formulas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*construct) return cmd_construct(g, construct_args);
    if (*run) return cmd_run(g, manifest);
    if (*report) return cmd_report(g, csvs);
    if (*verify) return cmd_verify(g, suite, verify_beta, verify_samples);
    if (*sample) return cmd_sample(g, sample_args, sample_instance, sample_n, sample_trial);
    if (*bounds) return cmd_bounds(bound_betas, bound_m, bound_eps);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailure;
  }
  return kUsage;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage{"plvote"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace plvote::cli
