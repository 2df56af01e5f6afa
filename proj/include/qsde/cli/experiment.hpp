#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qsde/cli/config.hpp"

namespace qsde::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,  // usage or validation error
  kExitIo = 3,
  kExitRuntime = 4,   // integration or invariant failure
  kExitContract = 5,  // the mode's own check failed (e.g. residual above tolerance)
};

/// A delimited table with a "# key: value" metadata block. Columns and row
/// widths must agree and every value must be finite; write() enforces both.
struct TrajectoryRecord {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::string to_tsv() const;
  void write(const std::filesystem::path& path) const;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::filesystem::path> files;
};

/// Runs one experiment and writes its files under config.output_path.
/// Validation problems throw ConfigError; everything else is reported in
/// the result.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace qsde::cli
