#include "plvote/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "plvote/common.hpp"

namespace plvote {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

bool is_permutation_of_range(const std::vector<int>& v, int m) {
  if (static_cast<int>(v.size()) != m) return false;
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  for (int c : v) {
    if (c < 0 || c >= m || seen[c]) return false;
    seen[c] = 1;
  }
  return true;
}

void Instance::validate() const {
  require(m >= 2, "instance needs m >= 2 candidates, got " + std::to_string(m));
  require(m <= 65535, "instance supports at most 65535 candidates");
  require(std::isfinite(beta) && beta >= 1.0, "beta must be >= 1");
  require(!types.empty() || !families.empty(), "instance has no voter types");
  double total = 0.0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& t = types[i];
    const std::string where = "type " + std::to_string(i);
    require(t.fraction > 0.0 && t.fraction <= 1.0, where + ": fraction must be in (0,1]");
    require(static_cast<int>(t.utilities.size()) == m,
            where + ": expected " + std::to_string(m) + " utilities");
    for (double u : t.utilities) require(in_unit(u), where + ": utilities must lie in [0,1]");
    total += t.fraction;
  }
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto& f = families[i];
    const std::string where = "family " + std::to_string(i);
    require(f.fraction > 0.0 && f.fraction <= 1.0, where + ": fraction must be in (0,1]");
    require(f.special >= 0 && f.special < m, where + ": special candidate out of range");
    require(f.k >= 1 && f.k <= m - 1, where + ": subset size k must satisfy 1 <= k <= m-1");
    require(in_unit(f.base) && in_unit(f.high) && in_unit(f.low),
            where + ": utilities must lie in [0,1]");
    total += f.fraction;
  }
  require(std::abs(total - 1.0) <= kFractionTolerance,
          "mixture fractions sum to " + std::to_string(total) + ", expected 1");
}

std::vector<double> Instance::util() const {
  std::vector<double> u(static_cast<std::size_t>(m), 0.0);
  for (const auto& t : types)
    for (int j = 0; j < m; ++j) u[j] += t.fraction * t.utilities[j];
  for (const auto& f : families) {
    const double in = static_cast<double>(f.k) / (m - 1);
    for (int j = 0; j < m; ++j) {
      u[j] += f.fraction * (j == f.special ? f.base : in * f.high + (1.0 - in) * f.low);
    }
  }
  return u;
}

nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["m"] = inst.m;
  j["beta"] = inst.beta;
  j["types"] = nlohmann::json::array();
  for (const auto& t : inst.types)
    j["types"].push_back({{"fraction", t.fraction}, {"utilities", t.utilities}});
  j["families"] = nlohmann::json::array();
  for (const auto& f : inst.families) {
    j["families"].push_back({{"fraction", f.fraction},
                             {"special", f.special},
                             {"base", f.base},
                             {"high", f.high},
                             {"low", f.low},
                             {"k", f.k}});
  }
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  try {
    inst.m = j.at("m").get<int>();
    inst.beta = j.at("beta").get<double>();
    if (j.contains("types")) {
      for (const auto& t : j.at("types"))
        inst.types.push_back({t.at("fraction").get<double>(),
                              t.at("utilities").get<std::vector<double>>()});
    }
    if (j.contains("families")) {
      for (const auto& f : j.at("families")) {
        SymmetricSubsetFamily fam;
        fam.fraction = f.at("fraction").get<double>();
        fam.special = f.at("special").get<int>();
        fam.base = f.at("base").get<double>();
        fam.high = f.at("high").get<double>();
        fam.low = f.at("low").get<double>();
        fam.k = f.at("k").get<int>();
        inst.families.push_back(fam);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed instance JSON: ") + e.what());
  }
  inst.validate();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open instance file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(inst).dump(2) << '\n';
}

}  // namespace plvote
