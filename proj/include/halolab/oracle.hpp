#pragma once

// Reference implementations used to check the production code: a serial
// whole-domain solver, Toro's exact Riemann solver and a brute-force ghost
// cell checker. None of them share code with the block solver.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "halolab/bench.hpp"

namespace halolab::oracle {

struct ReferenceResult {
  std::vector<double> field;  // [var][z][y][x]
  double time = 0.0;
  int steps = 0;
};

// Integrates config on one periodic array, ignoring ranks, threads and
// exchange settings.
ReferenceResult serial_reference(const RunConfig& config);

struct Primitive {
  double rho = 0.0;
  double u = 0.0;
  double p = 0.0;
};

class ExactRiemann {
 public:
  ExactRiemann(Primitive left, Primitive right, double gamma = 1.4);

  double star_pressure() const { return p_star_; }
  double star_velocity() const { return u_star_; }
  // Self-similar solution at xi = (x - x0) / t.
  Primitive sample(double xi) const;

 private:
  double pressure_function(double p, const Primitive& s, double c, double& derivative) const;

  Primitive l_, r_;
  double gamma_;
  double cl_, cr_;
  double p_star_ = 0.0;
  double u_star_ = 0.0;
};

// Mean density of the exact solution over [x_lo, x_hi] at time t, for a
// discontinuity initially at x0.
double exact_density_average(const ExactRiemann& rs, double x0, double t, double x_lo, double x_hi,
                             int samples = 32);

struct GhostCheck {
  std::int64_t checked = 0;
  std::int64_t mismatches = 0;
  std::string first_mismatch;

  bool ok() const { return mismatches == 0 && checked > 0; }
};

// Compares every face ghost cell of every block with the interior value of
// the periodic neighbor cell it mirrors, found by global coordinate lookup.
GhostCheck check_ghosts(const GridConfig& grid, std::span<const Block> blocks);

struct GhostRun {
  GridConfig grid;
  int ranks = 1;
  int threads = 1;
  int nvar = 1;
  ExchangeStrategy strategy = ExchangeStrategy::fused;
  Scheduling scheduling = Scheduling::dynamic(1);
  IntranodePath path = IntranodePath::shared_handoff;
  // Fault injection: leave one transfer of the halo plan out.
  bool drop_one_transfer = false;
};

// Fills interiors with position-unique values and ghosts with NaN, performs
// one exchange on every rank and checks the result.
GhostCheck run_ghost_check(const GhostRun& run);

}  // namespace halolab::oracle
