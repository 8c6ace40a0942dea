#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plvote/constructions.hpp"

namespace plvote::cli {

enum ExitCode : int { kOk = 0, kCheckFailure = 1, kUsage = 2 };

/// Bad user input: unknown family, malformed manifest or CSV. Maps to kUsage.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV

/// One result row. Unset optionals are written as empty fields; infinities
/// as the string "inf".
struct CsvRow {
  std::string rule;
  int m = 0;
  double beta = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::optional<double> population_distortion;
  std::optional<double> empirical_mean;
  std::optional<double> ci_lo, ci_hi;
  std::optional<double> ub, lb;
  std::optional<bool> satisfied;
  std::string version;
  std::string status = "ok";
};

extern const char* const kCsvHeader;

std::string format_number(double x);
std::string csv_line(const CsvRow& row);
void write_csv(const std::filesystem::path& path, const std::vector<CsvRow>& rows);

/// Parses text produced by write_csv. Throws InputError naming the 1-based
/// line of the first malformed row. Empty input yields no rows.
std::vector<CsvRow> parse_csv(const std::string& text);

// ---------------------------------------------------------------------------
// SVG

/// Distortion against beta, one series per rule, with dashed upper and
/// dotted lower reference curves. Unbounded points are drawn as clipped
/// markers at the top edge.
std::string render_svg(const std::vector<CsvRow>& rows, const std::string& title);

// ---------------------------------------------------------------------------
// Experiments

struct Manifest {
  std::string id;
  nlohmann::json instance;  // {"path": ...} or {"construct": family, "params": {...}}
  std::vector<std::string> rules;
  std::vector<double> beta_grid;  // empty: use the instance's own beta
  std::size_t n = 1000;
  std::size_t trials = 10;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> tiebreak;
  double ppv_alpha = 1.0;
  double epsilon = 0.1;  // used for the tabulated lower bounds
  std::optional<std::string> out;
  nlohmann::json raw;
};

Manifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

struct RunOptions {
  std::uint64_t seed = 0;           // used when the manifest has no seed
  bool seed_override = false;       // --seed given explicitly
  double tolerance = 1e-9;          // relative slack on upper-bound checks
};

struct RunResult {
  std::vector<CsvRow> rows;
  nlohmann::json record;
  std::size_t failed_rows = 0;
};

/// Executes every (beta, rule) pair. Failures become rows with an error
/// status; the run continues.
RunResult run_manifest(const Manifest& manifest, const RunOptions& opt);

/// Builds a construction by family name from a JSON parameter object.
/// Unknown families and parameter names raise InputError; rejected
/// parameter values raise PreconditionError.
ConstructionReport construct_family(const std::string& family, const nlohmann::json& params);

/// Full command line entry point; returns the process exit code.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace plvote::cli
