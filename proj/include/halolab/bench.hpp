#pragma once

// Experiment orchestration: single runs of the full pipeline, strong/weak
// scaling sweeps, and synthetic load imbalance.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halolab/exchange.hpp"
#include "halolab/grid.hpp"
#include "halolab/metrics.hpp"
#include "halolab/runtime.hpp"
#include "halolab/solver.hpp"

namespace halolab {

enum class InitialCondition {
  smooth,  // advection: 1 + 0.5 sin(2pi x) sin(2pi y) sin(2pi z); euler: density wave in uniform flow
  sod_x,   // periodic Sod pair: high state for x < L/4 or x >= 3L/4
};

std::string to_string(InitialCondition ic);
InitialCondition parse_initial_condition(const std::string& text);

// Per-block work multiplier in [1, k], a deterministic hash of (seed, morton).
struct ImbalanceProfile {
  std::uint64_t seed = 0;
  int max_multiplier = 1;

  int multiplier(std::uint64_t morton) const;
};

// Wraps a block's compute task so its flux evaluation runs `multiplier`
// times; the extra evaluations are discarded.
using ComputeTask = std::function<void(int flux_repeats)>;
std::function<void()> apply_imbalance(const ImbalanceProfile& profile, const BlockId& block, ComputeTask base);

struct RunConfig {
  GridConfig grid = GridConfig::cube(64, 16);
  PhysicsSystem system = PhysicsSystem::advection({1.0, 0.5, 0.25});
  SolverConfig solver;
  InitialCondition init = InitialCondition::smooth;
  int ranks = 1;
  int threads = 1;
  ExchangeStrategy strategy = ExchangeStrategy::fused;
  Scheduling scheduling = Scheduling::static_blocked();
  IntranodePath path = IntranodePath::shared_handoff;
  int steps = 10;
  // When set, steps is ignored and the run advances to exactly this time.
  std::optional<double> end_time;
  std::optional<ImbalanceProfile> imbalance;
  std::optional<EnergyModel> energy;
  std::chrono::milliseconds watchdog = default_watchdog();

  void validate() const;
  ConfigEcho echo() const;
  // Canonical text of every result-affecting parameter.
  std::string canonical() const;
};

// Initial conserved state at a point.
State initial_state(const RunConfig& config, double x, double y, double z);
void fill_initial(const RunConfig& config, Block& block);

struct RunOutput {
  RunMetrics metrics;
  // Interior field, layout [var][z][y][x], x fastest.
  std::vector<double> field;
  double time = 0.0;
  int steps_taken = 0;
};

// Full pipeline on config.ranks simulated ranks. Errors propagate as Error
// with the config echo prepended.
RunMetrics run_once(const RunConfig& config, int rep = 0);
RunOutput run_detailed(const RunConfig& config, int rep = 0);

std::string run_id(const RunConfig& config, int rep);

enum class ScalingMode { strong, weak };

struct SweepSpec {
  std::string name = "custom";
  ScalingMode scaling = ScalingMode::strong;
  std::int64_t cells_per_core = 65536;
  RunConfig base;
  std::vector<std::pair<int, int>> configs;  // (ranks, threads)
  std::vector<ExchangeStrategy> strategies{ExchangeStrategy::fused};
  std::vector<Scheduling> schedulings{Scheduling::static_blocked()};
  std::vector<IntranodePath> paths{IntranodePath::shared_handoff};
  int repetitions = 5;

  void validate() const;
};

struct ConfigSummary {
  ConfigEcho config;
  int runs = 0;
  double median_wall_s = 0.0;
  double min_wall_s = 0.0;
  double max_wall_s = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
  std::optional<double> cells_per_core;
  std::string error;
};

struct SweepResult {
  std::vector<RunMetrics> rows;
  std::vector<ConfigSummary> summary;
  std::vector<std::string> warnings;
};

// Grid for a weak-scaling point: cube edge = cbrt(cells_per_core * cores)
// rounded up to a multiple of block.
GridConfig weak_scaling_grid(std::int64_t cells_per_core, int cores, int block);

double median(std::vector<double> values);

using SweepProgress = std::function<void(const RunMetrics&)>;
SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress = nullptr);

// Named presets: strong, weak, hybrid-node, overlap, imbalance.
SweepSpec sweep_template(const std::string& name);
std::vector<std::string> sweep_template_names();

// key=value text of the resolved spec.
std::string sweep_manifest(const SweepSpec& spec);

}  // namespace halolab
