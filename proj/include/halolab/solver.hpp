#pragma once

// Second-order explicit finite-volume update on one block and the two-stage
// Heun (SSP-RK2) integrator over a rank's blocks.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "halolab/block.hpp"
#include "halolab/physics.hpp"

namespace halolab {

struct Scheme {
  PhysicsSystem system = PhysicsSystem::advection({1.0, 0.0, 0.0});
  SolverConfig config;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
};

// Per-block scratch: face fluxes, the accumulated increment and the stage-0
// copy used by the second Heun stage.
struct StageWorkspace {
  explicit StageWorkspace(const BlockShape& shape);

  std::vector<double> flux;
  std::vector<double> increment;
  std::vector<double> saved;
  // Flux evaluations per stage; values > 1 inflate work without changing results.
  int flux_repeats = 1;

  std::size_t bytes() const { return (flux.size() + increment.size() + saved.size()) * sizeof(double); }
};

// Candidate dt from this rank's interior cells: cfl / max(speed_axis / dx_axis).
// Returns config.dt_max when every speed is zero.
double compute_dt(std::span<const Block> blocks, const Scheme& scheme);

// increment = dt/dx_x (Fx+ - Fx-) + dt/dx_y (Fy+ - Fy-) + dt/dx_z (Fz+ - Fz-),
// accumulated in that order on interior cells.
void compute_increment(const Block& block, StageWorkspace& ws, double dt, const Scheme& scheme);

// Forward-Euler stage: u <- u - increment on interior cells.
void update_block_stage(Block& block, StageWorkspace& ws, double dt, const Scheme& scheme);

// Runs body(i) for i in [0, count); parallel or serial.
using BlockLoop = std::function<void(std::size_t count, const std::function<void(std::size_t)>& body)>;
void serial_block_loop(std::size_t count, const std::function<void(std::size_t)>& body);

// Refreshes ghost cells before stage `stage` (0 or 1).
using ExchangeCallback = std::function<void(int stage)>;

// u1 = u0 + dt L(u0); u2 = 1/2 u0 + 1/2 (u1 + dt L(u1)). Returns the number
// of cell updates performed (2 per interior cell).
std::int64_t rk2_step(std::span<Block> blocks, std::span<StageWorkspace> workspaces, double dt,
                      const Scheme& scheme, const ExchangeCallback& exchange,
                      const BlockLoop& loop = serial_block_loop);

// The two halves of rk2_step, for callers that time them separately.
void rk2_stage(int stage, Block& block, StageWorkspace& ws, double dt, const Scheme& scheme);

}  // namespace halolab
