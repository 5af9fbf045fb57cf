#pragma once

// The oracle suite behind `halolab validate` and the acceptance checks.

#include <string>
#include <utility>
#include <vector>

#include "halolab/bench.hpp"
#include "halolab/oracle.hpp"

namespace halolab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct GhostSweep {
  std::vector<int> grids{16, 32};
  std::vector<int> blocks{8};
  std::vector<int> ranks{1, 2, 4};
  std::vector<int> nvars{1, 5};
  bool drop_one_transfer = false;
};
CheckResult check_ghost_correctness(const GhostSweep& sweep);

// Hash of the final field must agree across all listed configurations.
struct EquivalenceSweep {
  RunConfig base;
  std::vector<std::pair<int, int>> configs{{1, 1}, {2, 2}, {4, 2}, {1, 8}};
  std::vector<ExchangeStrategy> strategies{ExchangeStrategy::fused, ExchangeStrategy::split_overlap};
  std::vector<Scheduling> schedulings{Scheduling::static_blocked(), Scheduling::dynamic(1)};
  std::vector<IntranodePath> paths{IntranodePath::shared_handoff, IntranodePath::copy_through};
};
CheckResult check_equivalence(const std::string& name, const EquivalenceSweep& sweep);

// Parallel pipeline against the serial whole-domain reference.
CheckResult check_serial_reference(const std::string& name, const RunConfig& config, double tolerance = 1e-12);

// Largest relative change of any conserved total, divided by steps taken.
double conservation_drift_per_step(const RunConfig& config);
CheckResult check_conservation(const RunConfig& config, double tolerance = 1e-12);

// L1 error after one periodic crossing of v = (1,0,0) on an n^3 grid, or an
// n x B x B slab when thin is set (the y/z resolution plays no role for
// x-aligned transport).
double advection_l1_error(int n, bool thin, int ranks = 1, int threads = 1);
CheckResult check_convergence(int coarse, int fine, bool thin, double min_order = 1.8);

// Periodic Sod pair on a domain of length 2 with 2*cells cells; L1 density
// error over [0,1) against exact cell averages at t.
double sod_l1_error(int cells, double t = 0.2, int ranks = 1, int threads = 1);
CheckResult check_sod(int cells, double max_l1 = 0.02);

CheckResult check_energy_arithmetic();

struct ValidateOptions {
  bool fault_skip_exchange = false;
};
std::vector<CheckResult> run_validation(const ValidateOptions& options = {});
std::string format_results(const std::vector<CheckResult>& results);

}  // namespace halolab
