#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace pv5::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitRequiredFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

struct TGrid {
  std::string start = "0.05";
  std::string stop = "1.0";
  int count = 12;
  std::string spacing = "log";  // linear | log
};

struct RunConfig {
  std::string command;  // moments recurrence ladder verify ode pv-residual
  std::string alpha = "1";
  std::string k2 = "0.25";
  std::optional<std::string> t;  // a single t overrides the grid
  TGrid grid;
  int n_max = 12;
  int bits = 256;
  std::optional<std::string> rel_tol;
  int max_level = 12;
  std::string out_json = "-";
  std::optional<std::string> out_csv;
  std::string suite = "required";  // required | diagnostic | all
  std::uint64_t seed = 12345;
  std::string ode_tol = "1e-12";
  std::string system = "riccati";  // riccati | pv
};

// Runs one subcommand and writes its outputs. Messages go to `err`.
int run(const RunConfig& config, std::ostream& err);

// Parses argv and runs. Usage errors return kExitUsage.
int main_entry(int argc, char** argv);

}  // namespace pv5::cli
