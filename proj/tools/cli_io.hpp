#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pco/sample.hpp"
#include "pco/selection.hpp"

namespace pco::cli {

/// Invalid flags, config files or spec strings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input, malformed data files, unwritable outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3, kNoTransition = 4 };

enum class Subcommand { select, calibrate, simulate, gwn_demo };

std::string_view subcommand_name(Subcommand s);

struct RunConfig {
  Subcommand subcommand = Subcommand::select;
  std::string input;
  std::string out = ".";
  std::string kernel = "gaussian";
  /// "geometric:<hmin>:<hmax>:<count>", one spec per axis separated by ';'.
  /// Empty means the default grid for the sample size.
  std::string grid;
  double lambda = 1.0;
  /// "<lo>:<hi>:<count>" or a comma-separated list. Empty means the
  /// subcommand default.
  std::string lambda_grid;
  /// select: one method; simulate: comma-separated list.
  std::string method = "pco";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::optional<double> kappa;
  std::optional<double> kappa2;
  /// Replaces the timestamp in output file names.
  std::string stamp;
  // simulate
  std::string density = "standard_normal";
  std::size_t n = 1000;
  std::size_t reps = 100;
  // gwn-demo
  std::size_t N = 500;
  std::optional<double> epsilon;
  std::string theta = "zero";

  /// Throws ConfigError.
  void validate() const;
};

/// One observation per row. A first row with a non-numeric cell is taken as a
/// header. Blank lines are skipped. Throws IoError for unreadable files and
/// ParseError (with the row number) for bad rows.
Sample ingest_csv(const std::filesystem::path& path);

BandwidthGrid parse_grid_spec(std::string_view spec, std::size_t dim);
std::vector<double> parse_lambda_grid(std::string_view spec);

/// Keys named like the long flags (with '_' for '-'). Values in the file win
/// over flags. Throws ConfigError for unknown keys or wrong types.
void apply_config(RunConfig& config, const nlohmann::ordered_json& overrides);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Parses argv into a config (applying --config). Returns nullopt after
/// printing help. Throws ConfigError.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out);

/// Executes the subcommand, writes <out>/<subcommand>_<stamp>.{json,csv} and
/// returns the status object printed on stdout. Throws on failure.
nlohmann::ordered_json execute(const RunConfig& config);

/// execute() with failures mapped to exit codes and an error object on `out`.
int run(const RunConfig& config, std::ostream& out);

/// Full command-line entry point.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pco::cli
