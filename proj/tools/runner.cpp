#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>

#include "cli.hpp"
#include "plvote/distortion.hpp"

namespace plvote::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw InputError(where + ": unknown key '" + k + "'");
}

double number(const json& p, const char* key) {
  if (!p.contains(key)) throw InputError(std::string("missing parameter '") + key + "'");
  if (!p.at(key).is_number()) throw InputError(std::string("parameter '") + key + "' must be a number");
  return p.at(key).get<double>();
}

double number_or(const json& p, const char* key, double fallback) {
  return p.contains(key) ? number(p, key) : fallback;
}

int integer(const json& p, const char* key, int fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number_integer()) throw InputError(std::string("parameter '") + key + "' must be an integer");
  return p.at(key).get<int>();
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json opt_json(const std::optional<double>& x) {
  if (!x) return nullptr;
  if (std::isinf(*x)) return "inf";
  return *x;
}

json row_json(const CsvRow& r) {
  return {{"rule", r.rule},
          {"m", r.m},
          {"beta", r.beta},
          {"n", r.n},
          {"trials", r.trials},
          {"seed", r.seed},
          {"population_distortion", opt_json(r.population_distortion)},
          {"empirical_mean", opt_json(r.empirical_mean)},
          {"ci_lo", opt_json(r.ci_lo)},
          {"ci_hi", opt_json(r.ci_hi)},
          {"ub", opt_json(r.ub)},
          {"lb", opt_json(r.lb)},
          {"satisfied", r.satisfied ? json(*r.satisfied) : json()},
          {"version", r.version},
          {"status", r.status}};
}

struct Built {
  Instance instance;
  std::vector<Candidate> tiebreak;
  json construction;
};

Built build_instance(const Manifest& mf, std::optional<double> beta) {
  Built b;
  if (mf.instance.contains("path")) {
    b.instance = load_instance(mf.instance.at("path").get<std::string>());
    if (beta) b.instance.beta = *beta;
    b.instance.validate();
    return b;
  }
  json params = mf.instance.value("params", json::object());
  if (beta) params["beta"] = *beta;
  const ConstructionReport r = construct_family(mf.instance.at("construct").get<std::string>(), params);
  b.instance = r.instance;
  b.tiebreak = r.tiebreak;
  b.construction = to_json(r);
  return b;
}

CsvRow base_row(const std::string& rule, int m, double beta, const Manifest& mf, std::uint64_t seed) {
  CsvRow r;
  r.rule = rule;
  r.m = m;
  r.beta = beta;
  r.n = mf.n;
  r.trials = mf.trials;
  r.seed = seed;
  r.version = version();
  return r;
}

// One shared simulation; on failure, rerun rule by rule so a single bad rule
// does not take the others down.
void simulate_isolated(const Instance& inst, const std::vector<Rule>& rules, const SimulationConfig& cfg,
                       std::vector<std::optional<DistortionEstimate>>& est, std::vector<std::string>& errors) {
  try {
    auto all = simulate_rules(inst, rules, cfg);
    for (std::size_t i = 0; i < all.size(); ++i) est[i] = std::move(all[i]);
    return;
  } catch (const std::exception&) {
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    try {
      est[i] = empirical_distortion(inst, rules[i], cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
}

}  // namespace

ConstructionReport construct_family(const std::string& family, const json& params) {
  const json p = params.is_null() ? json::object() : params;
  if (family == "rd") {
    check_keys(p, {"m", "beta", "epsilon"}, "rd parameters");
    return construct_rd_lb(integer(p, "m", 5), number(p, "beta"), number_or(p, "epsilon", 0.1));
  }
  if (family == "plurality") {
    check_keys(p, {"m", "beta", "epsilon"}, "plurality parameters");
    return construct_plurality_lb(integer(p, "m", 10), number(p, "beta"), number_or(p, "epsilon", 0.1));
  }
  if (family == "plurality_veto") {
    check_keys(p, {"m", "beta"}, "plurality_veto parameters");
    return construct_pluralityveto_lb(integer(p, "m", 400), number(p, "beta"));
  }
  if (family == "copeland") {
    check_keys(p, {"beta", "epsilon"}, "copeland parameters");
    return construct_copeland_lb(number(p, "beta"), number_or(p, "epsilon", 0.1));
  }
  if (family == "tournament") {
    check_keys(p, {"rho", "epsilon", "gamma", "beta"}, "tournament parameters");
    const double rho = number_or(p, "rho", 0.05);
    std::optional<double> beta;
    if (p.contains("beta") && !(p.at("beta").is_string() && p.at("beta") == "auto")) beta = number(p, "beta");
    return construct_tournament_lb(rho, number_or(p, "epsilon", 0.1),
                                   number_or(p, "gamma", default_tournament_gamma(rho)), beta);
  }
  throw InputError("unknown family '" + family + "' (expected rd, plurality, plurality_veto, copeland, tournament)");
}

Manifest parse_manifest(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"id", "description", "instance", "rules", "beta_grid", "n", "trials", "seed", "tiebreak",
                 "ppv_alpha", "epsilon", "out"},
             "manifest");
  Manifest mf;
  mf.raw = j;
  try {
    mf.id = j.at("id").get<std::string>();
    if (mf.id.empty() || mf.id.find_first_of("/\\") != std::string::npos)
      throw InputError("manifest id must be a non-empty file name");
    mf.instance = j.at("instance");
    if (mf.instance.contains("path")) {
      check_keys(mf.instance, {"path"}, "manifest instance");
      std::filesystem::path path = mf.instance.at("path").get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      if (!std::filesystem::exists(path)) throw InputError("instance file not found: " + path.string());
      mf.instance["path"] = path.string();
    } else if (mf.instance.contains("construct")) {
      check_keys(mf.instance, {"construct", "params"}, "manifest instance");
    } else {
      throw InputError("manifest instance needs 'path' or 'construct'");
    }
    mf.rules = j.at("rules").get<std::vector<std::string>>();
    if (mf.rules.empty()) throw InputError("manifest rules must not be empty");
    mf.beta_grid = j.value("beta_grid", std::vector<double>{});
    mf.n = j.value("n", mf.n);
    mf.trials = j.value("trials", mf.trials);
    if (j.contains("seed")) mf.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tiebreak")) mf.tiebreak = j.at("tiebreak").get<std::vector<int>>();
    mf.ppv_alpha = j.value("ppv_alpha", mf.ppv_alpha);
    mf.epsilon = j.value("epsilon", mf.epsilon);
    if (j.contains("out")) mf.out = j.at("out").get<std::string>();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  if (mf.n < 1 || mf.trials < 1) throw InputError("manifest needs n >= 1 and trials >= 1");
  return mf;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open manifest " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw InputError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_manifest(j, path.parent_path());
}

RunResult run_manifest(const Manifest& mf, const RunOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t seed = opt.seed_override ? opt.seed : mf.seed.value_or(opt.seed);
  RunResult res;
  json instances = json::array();

  std::vector<std::optional<double>> betas;
  for (double b : mf.beta_grid) betas.emplace_back(b);
  if (betas.empty()) betas.emplace_back(std::nullopt);

  for (const auto& beta : betas) {
    Built built;
    try {
      built = build_instance(mf, beta);
    } catch (const std::exception& e) {
      for (const auto& name : mf.rules) {
        CsvRow r = base_row(name, 0, beta.value_or(0.0), mf, seed);
        r.status = std::string("error: ") + e.what();
        res.rows.push_back(r);
        ++res.failed_rows;
      }
      continue;
    }
    const Instance& inst = built.instance;
    instances.push_back({{"beta", inst.beta}, {"instance", to_json(inst)}, {"construction", built.construction}});

    SimulationConfig cfg;
    cfg.n = mf.n;
    cfg.trials = mf.trials;
    cfg.seed = seed;
    cfg.rule_config.ppv_alpha = mf.ppv_alpha;

    // Rows are emitted in manifest order; valid rules share one simulation.
    std::vector<CsvRow> rows;
    std::vector<Rule> valid;
    std::vector<std::size_t> slot;
    for (const auto& name : mf.rules) {
      rows.push_back(base_row(name, inst.m, inst.beta, mf, seed));
      if (const auto r = rule_from_name(name)) {
        valid.push_back(*r);
        slot.push_back(rows.size() - 1);
      } else {
        rows.back().status = "error: unknown rule '" + name + "'";
      }
    }

    std::vector<std::optional<DistortionEstimate>> est(valid.size());
    std::vector<std::string> errors(valid.size());
    bool configured = true;
    try {
      const auto& tb = mf.tiebreak ? *mf.tiebreak : built.tiebreak;
      if (!tb.empty()) {
        require(static_cast<int>(tb.size()) == inst.m, "tie-break order has " + std::to_string(tb.size()) +
                                                           " entries for " + std::to_string(inst.m) + " candidates");
        cfg.rule_config.tiebreak = TieBreakOrder(tb);
      }
    } catch (const std::exception& e) {
      configured = false;
      for (auto& msg : errors) msg = e.what();
    }
    if (configured && !valid.empty()) simulate_isolated(inst, valid, cfg, est, errors);

    for (std::size_t i = 0; i < valid.size(); ++i) {
      CsvRow& row = rows[slot[i]];
      if (!est[i]) {
        row.status = "error: " + errors[i];
        continue;
      }
      const DistortionEstimate& e = *est[i];
      row.population_distortion = e.population_value;
      row.empirical_mean = e.empirical_mean;
      if (e.has_ci) row.ci_lo = e.ci_lo, row.ci_hi = e.ci_hi;
      if (valid[i] != Rule::MaximalLotteries) {
        const BoundReport b = tabulated_bounds(valid[i], inst.beta, inst.m, mf.epsilon);
        row.ub = b.upper_bound;
        row.lb = b.lower_bound;
        if (b.upper_bound) {
          const double observed = e.population_value ? *e.population_value : e.empirical_mean;
          row.satisfied = observed <= *b.upper_bound * (1.0 + opt.tolerance);
        }
      }
      if (e.unbounded) row.status = "ok; unbounded (numerator " + format_number(e.numerator) + ")";
      else if (!e.population_value && !needs_profile(valid[i])) row.status = "ok; population limit ambiguous";
    }

    for (auto& row : rows) {
      if (row.status.rfind("error", 0) == 0) ++res.failed_rows;
      res.rows.push_back(std::move(row));
    }
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json rows = json::array();
  for (const auto& r : res.rows) rows.push_back(row_json(r));
  res.record = {{"manifest", mf.raw},
                {"version", version()},
                {"started_at", utc_now()},
                {"wall_seconds", wall},
                {"seed", seed},
                {"tolerance", opt.tolerance},
                {"instances", instances},
                {"rows", rows},
                {"failed_rows", res.failed_rows}};
  return res;
}

}  // namespace plvote::cli
