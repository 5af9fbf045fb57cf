#include "halolab/metrics.hpp"

#include <cmath>

#include "halolab/error.hpp"

namespace halolab {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::compute: return "compute";
    case Phase::pack: return "pack";
    case Phase::local_copy: return "localcopy";
    case Phase::comm_wait: return "wait";
    case Phase::unpack: return "unpack";
    case Phase::serial_other: return "serial";
  }
  return "?";
}

double PhaseTimes::total() const {
  double t = 0.0;
  for (double s : seconds) t += s;
  return t;
}

PhaseTimes& PhaseTimes::operator+=(const PhaseTimes& o) {
  for (int i = 0; i < kNumPhases; ++i) seconds[i] += o.seconds[i];
  return *this;
}

void EnergyModel::validate() const {
  if (!(node_power_w > 0.0)) throw ConfigError("node power must be positive");
  if (nodes < 1) throw ConfigError("node count must be positive");
  if (!(carbon_g_per_kwh > 0.0)) throw ConfigError("carbon intensity must be positive");
}

std::int64_t cellupdates(std::int64_t interior_cells, std::int64_t steps, std::int64_t substeps) {
  if (interior_cells < 0 || steps < 0 || substeps < 0) throw DomainError("cellupdates: negative input");
  return interior_cells * steps * substeps;
}

double energy_to_solution(const EnergyModel& model, double wall_s) {
  if (wall_s < 0.0) throw DomainError("energy_to_solution: negative wall time");
  return model.node_power_w * model.nodes * wall_s;
}

double epc6(double energy_j, double updates) {
  if (!(updates > 0.0)) throw DomainError("epc6: cellupdates must be positive");
  return energy_j / (updates / 1e6);
}

double energy_from_rate(double updates, double energy_per_million) { return updates / 1e6 * energy_per_million; }

double co2_equivalent(double energy_kwh, double intensity_g_per_kwh) {
  if (energy_kwh < 0.0 || intensity_g_per_kwh < 0.0) throw DomainError("co2_equivalent: negative input");
  return energy_kwh * intensity_g_per_kwh;
}

ScalingFigures speedup_efficiency(double t_ref, double cores_ref, double t, double cores) {
  if (!(t_ref > 0.0 && cores_ref > 0.0 && t > 0.0 && cores > 0.0))
    throw DomainError("speedup_efficiency: inputs must be positive");
  ScalingFigures f;
  f.speedup = t_ref / t;
  f.efficiency = f.speedup / (cores / cores_ref);
  return f;
}

double comm_fraction(const PhaseTimes& p) {
  const double total = p.total();
  if (!(total > 0.0)) throw DomainError("comm_fraction: all phases are zero");
  return (p[Phase::comm_wait] + p[Phase::pack] + p[Phase::unpack] + p[Phase::local_copy]) / total;
}

double mcups(std::int64_t updates, double wall_s) {
  if (!(wall_s > 0.0)) return 0.0;
  return static_cast<double>(updates) / wall_s / 1e6;
}

std::string describe(const ConfigEcho& e) {
  return "ranks=" + std::to_string(e.ranks) + " threads=" + std::to_string(e.threads) + " strategy=" + e.strategy +
         " scheduling=" + e.scheduling + " path=" + e.path + " system=" + e.system + " grid=" + std::to_string(e.nx) +
         "x" + std::to_string(e.ny) + "x" + std::to_string(e.nz) + " block=" + std::to_string(e.block) +
         " steps=" + std::to_string(e.steps);
}

}  // namespace halolab
