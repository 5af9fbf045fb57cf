#pragma once

// Command-line and spec-file configuration. Precedence: flag > spec file >
// sweep template > built-in default.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halolab/bench.hpp"
#include "halolab/kernels.hpp"

namespace halolab {

enum class Command { run, sweep, validate };

struct CliConfig {
  Command command = Command::run;
  RunConfig run;
  // Resolved sweep (template + overrides); used by Command::sweep.
  SweepSpec sweep;
  // CSV destination. run: empty means stdout. sweep: defaults to sweep.csv.
  std::string output;
  std::string spec_file;
  std::optional<KernelIsa> kernel;
  // Test hook for `validate`: drop one halo transfer from the ghost check.
  bool fault_skip_exchange = false;
  bool help = false;
  std::string help_text;
};

// args excludes the program name. Throws UsageError naming the offending flag.
CliConfig parse_config(const std::vector<std::string>& args);
CliConfig parse_config(int argc, const char* const* argv);

// "1x1,2x4" -> {(1,1), (2,4)}
std::vector<std::pair<int, int>> parse_config_list(const std::vector<std::string>& items);

}  // namespace halolab
