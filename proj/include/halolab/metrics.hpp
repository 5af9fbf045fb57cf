#pragma once

// Phase timers, cellupdate accounting, derived rates and the energy / CO2e
// conversion arithmetic.

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace halolab {

enum class Phase : int { compute = 0, pack, local_copy, comm_wait, unpack, serial_other };
inline constexpr int kNumPhases = 6;

const char* to_string(Phase p);

struct PhaseTimes {
  std::array<double, kNumPhases> seconds{};

  double& operator[](Phase p) { return seconds[static_cast<int>(p)]; }
  double operator[](Phase p) const { return seconds[static_cast<int>(p)]; }
  double total() const;
  // Accumulators only grow; negative durations are clamped to zero.
  void add(Phase p, double s) { seconds[static_cast<int>(p)] += s > 0.0 ? s : 0.0; }
  PhaseTimes& operator+=(const PhaseTimes& o);
};

// Accumulates the wall time of its scope into one phase (steady clock).
class ScopedPhase {
 public:
  ScopedPhase(PhaseTimes& times, Phase phase)
      : times_(times), phase_(phase), start_(std::chrono::steady_clock::now()) {}
  ~ScopedPhase() {
    times_.add(phase_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }
  ScopedPhase(const ScopedPhase&) = delete;
  ScopedPhase& operator=(const ScopedPhase&) = delete;

 private:
  PhaseTimes& times_;
  Phase phase_;
  std::chrono::steady_clock::time_point start_;
};

struct EnergyModel {
  double node_power_w = 277.0;
  int nodes = 1;
  double carbon_g_per_kwh = 275.0;

  void validate() const;
};

inline constexpr double kJoulesPerKwh = 3.6e6;

std::int64_t cellupdates(std::int64_t interior_cells, std::int64_t steps, std::int64_t substeps = 2);

double energy_to_solution(const EnergyModel& model, double wall_s);

// Joules per 10^6 cellupdates. Throws DomainError for zero cellupdates.
double epc6(double energy_j, double cellupdates);

// Energy of `cellupdates` at a given cost per 10^6 updates (any energy unit).
double energy_from_rate(double cellupdates, double energy_per_million);

double co2_equivalent(double energy_kwh, double intensity_g_per_kwh);

inline double joules_to_kwh(double j) { return j / kJoulesPerKwh; }
inline double kwh_to_joules(double kwh) { return kwh * kJoulesPerKwh; }

struct ScalingFigures {
  double speedup = 0.0;
  double efficiency = 0.0;
};

ScalingFigures speedup_efficiency(double t_ref, double cores_ref, double t, double cores);

// (CommWait + Pack + Unpack + LocalCopy) / total. Throws DomainError if all
// phases are zero.
double comm_fraction(const PhaseTimes& phases);

// Millions of cellupdates per second.
double mcups(std::int64_t cellupdates, double wall_s);

// Configuration echo carried by every result row.
struct ConfigEcho {
  int ranks = 1;
  int threads = 1;
  std::string strategy;
  std::string scheduling;
  std::string path;
  std::string system;
  int nx = 0;
  int ny = 0;
  int nz = 0;
  int block = 0;
  int steps = 0;
};

// "ranks=2 threads=4 strategy=fused ..." for error messages and logs.
std::string describe(const ConfigEcho& echo);

struct RunMetrics {
  ConfigEcho config;
  int rep = 0;
  std::string run_id;
  double wall_s = 0.0;
  std::int64_t cellupdates = 0;
  PhaseTimes phase;
  std::uint64_t mem_bytes = 0;
  std::uint64_t state_hash = 0;
  std::optional<double> energy_j;
  std::string error;
  // Set by weak-scaling sweeps: actual interior cells per (rank * thread).
  std::optional<double> cells_per_core;
};

}  // namespace halolab
