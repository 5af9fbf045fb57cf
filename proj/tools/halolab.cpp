#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "halolab/config.hpp"
#include "halolab/csv.hpp"
#include "halolab/error.hpp"
#include "halolab/hash.hpp"
#include "halolab/validate.hpp"

using namespace halolab;

namespace {

int do_run(const CliConfig& cli) {
  const RunMetrics m = run_once(cli.run);
  const std::vector<RunMetrics> rows{m};
  if (cli.output.empty())
    std::cout << csv_text(rows);
  else
    write_csv(cli.output, rows);
  std::cerr << describe(m.config) << ": " << m.wall_s << " s, " << mcups(m.cellupdates, m.wall_s) << " MCUP/s, hash "
            << hex64(m.state_hash) << "\n";
  return 0;
}

int do_sweep(const CliConfig& cli) {
  const SweepSpec& spec = cli.sweep;
  const auto manifest = sweep_manifest(spec);
  {
    std::ofstream f(cli.output + ".manifest");
    if (!f) throw IoError("cannot write '" + cli.output + ".manifest'");
    f << manifest;
  }
  const auto result = run_sweep(spec, [](const RunMetrics& m) {
    std::cerr << describe(m.config) << " rep " << m.rep << ": "
              << (m.error.empty() ? std::to_string(m.wall_s) + " s" : "error: " + m.error) << "\n";
  });
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  write_csv(cli.output, result.rows);
  write_summary_csv(cli.output + ".summary.csv", result.summary);
  std::cerr << "wrote " << result.rows.size() << " rows to " << cli.output << "\n";
  for (const auto& r : result.rows)
    if (!r.error.empty()) return 1;
  return 0;
}

int do_validate(const CliConfig& cli) {
  ValidateOptions opts;
  opts.fault_skip_exchange = cli.fault_skip_exchange;
  const auto results = run_validation(opts);
  std::cout << format_results(results);
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliConfig cli;
  try {
    cli = parse_config(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun `halolab --help` for the list of options\n";
    return 2;
  }
  if (cli.help) {
    std::cout << cli.help_text;
    return 0;
  }
  if (cli.kernel) set_active_isa(*cli.kernel);
  try {
    switch (cli.command) {
      case Command::run: return do_run(cli);
      case Command::sweep: return do_sweep(cli);
      case Command::validate: return do_validate(cli);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
