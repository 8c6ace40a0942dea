#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace plvote::cli {

const char* const kCsvHeader =
    "rule,m,beta,n,trials,seed,population_distortion,empirical_mean,ci_lo,ci_hi,ub,lb,satisfied,"
    "version,status";

namespace {

constexpr std::size_t kColumns = 15;

std::string opt_number(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string();
}

// Free text fields must not break the row structure.
std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line, const char* column) {
  if (s == "inf") return INFINITY;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("row " + std::to_string(line) + ": column " + column + " is not a number: '" + s + "'");
}

std::optional<double> parse_opt(const std::string& s, std::size_t line, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line, column);
}

std::uint64_t parse_uint(const std::string& s, std::size_t line, const char* column) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size() && !s.empty() && s[0] != '-') return v;
  } catch (const std::exception&) {
  }
  throw InputError("row " + std::to_string(line) + ": column " + column + " is not a non-negative integer: '" +
                   s + "'");
}

}  // namespace

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_line(const CsvRow& r) {
  std::ostringstream os;
  os << sanitize(r.rule) << ',' << r.m << ',' << format_number(r.beta) << ',' << r.n << ',' << r.trials
     << ',' << r.seed << ',' << opt_number(r.population_distortion) << ',' << opt_number(r.empirical_mean)
     << ',' << opt_number(r.ci_lo) << ',' << opt_number(r.ci_hi) << ',' << opt_number(r.ub) << ','
     << opt_number(r.lb) << ',' << (r.satisfied ? (*r.satisfied ? "true" : "false") : "") << ','
     << sanitize(r.version) << ',' << sanitize(r.status);
  return os.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<CsvRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << kCsvHeader << '\n';
  for (const auto& r : rows) f << csv_line(r) << '\n';
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw InputError("row 1: unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != kColumns)
      throw InputError("row " + std::to_string(lineno) + ": expected " + std::to_string(kColumns) +
                       " fields, found " + std::to_string(f.size()));
    CsvRow r;
    r.rule = f[0];
    if (r.rule.empty()) throw InputError("row " + std::to_string(lineno) + ": empty rule");
    r.m = static_cast<int>(parse_uint(f[1], lineno, "m"));
    r.beta = parse_double(f[2], lineno, "beta");
    r.n = parse_uint(f[3], lineno, "n");
    r.trials = parse_uint(f[4], lineno, "trials");
    r.seed = parse_uint(f[5], lineno, "seed");
    r.population_distortion = parse_opt(f[6], lineno, "population_distortion");
    r.empirical_mean = parse_opt(f[7], lineno, "empirical_mean");
    r.ci_lo = parse_opt(f[8], lineno, "ci_lo");
    r.ci_hi = parse_opt(f[9], lineno, "ci_hi");
    r.ub = parse_opt(f[10], lineno, "ub");
    r.lb = parse_opt(f[11], lineno, "lb");
    if (f[12] == "true") r.satisfied = true;
    else if (f[12] == "false") r.satisfied = false;
    else if (!f[12].empty())
      throw InputError("row " + std::to_string(lineno) + ": column satisfied must be true, false or empty");
    r.version = f[13];
    r.status = f[14];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace plvote::cli
