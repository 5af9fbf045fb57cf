#include "halolab/physics.hpp"

#include <string>

#include "halolab/error.hpp"

namespace halolab {

namespace {

void require_physical(const State& u, double gamma, const char* where) {
  const double p = euler_pressure(u, gamma);
  if (!(u[0] > 0.0) || !(p > 0.0))
    throw SolverError(std::string(where) + ": non-physical state (rho=" + std::to_string(u[0]) +
                      ", p=" + std::to_string(p) + ")");
}

void check_axis(int axis) {
  if (axis < 0 || axis > 2) throw DomainError("axis must be 0, 1 or 2");
}

}  // namespace

PhysicsSystem PhysicsSystem::advection(std::array<double, 3> velocity) {
  for (double v : velocity)
    if (!std::isfinite(v)) throw ConfigError("advection velocity must be finite");
  return PhysicsSystem(Advection{velocity});
}

PhysicsSystem PhysicsSystem::euler(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw ConfigError("gamma must be > 1 (got " + std::to_string(gamma) + ")");
  return PhysicsSystem(Euler{gamma});
}

KernelPhysics PhysicsSystem::kernel_params() const {
  KernelPhysics k;
  if (const auto* e = std::get_if<Euler>(&kind_)) {
    k.kind = KernelPhysics::Kind::euler;
    k.gamma = e->gamma;
  } else {
    k.kind = KernelPhysics::Kind::advection;
    k.velocity = std::get<Advection>(kind_).velocity;
  }
  return k;
}

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1] (got " + std::to_string(cfl) + ")");
  if (!(dt_max > 0.0)) throw ConfigError("dt_max must be positive");
}

double minmod(double a, double b) { return pointwise::minmod(a, b); }

void reconstruct_axis(std::span<const double> line, Reconstruction recon, std::span<double> minus,
                      std::span<double> plus) {
  const std::size_t n = line.size();
  if (minus.size() < n || plus.size() < n) throw DomainError("reconstruct_axis: output shorter than input");
  for (std::size_t c = 1; c + 1 < n; ++c) {
    if (recon == Reconstruction::first_order) {
      minus[c] = line[c];
      plus[c] = line[c];
    } else {
      const double slope = pointwise::minmod(line[c + 1] - line[c], line[c] - line[c - 1]);
      minus[c] = line[c] - 0.5 * slope;
      plus[c] = line[c] + 0.5 * slope;
    }
  }
}

double euler_pressure(const State& u, double gamma) {
  return pointwise::pressure(u[0], u[1], u[2], u[3], u[4], gamma);
}

State euler_conserved(double rho, std::array<double, 3> v, double p, double gamma) {
  State u{};
  u[0] = rho;
  u[1] = rho * v[0];
  u[2] = rho * v[1];
  u[3] = rho * v[2];
  u[4] = p / (gamma - 1.0) + 0.5 * rho * ((v[0] * v[0] + v[1] * v[1]) + v[2] * v[2]);
  return u;
}

State physical_flux(const State& u, int axis, const PhysicsSystem& system) {
  check_axis(axis);
  State f{};
  if (const auto* e = std::get_if<Euler>(&system.kind())) {
    double speed = 0.0;
    if (!pointwise::euler_side(u.data(), 1 + axis, e->gamma, f.data(), speed))
      require_physical(u, e->gamma, "physical_flux");
  } else {
    f[0] = std::get<Advection>(system.kind()).velocity[axis] * u[0];
  }
  return f;
}

State numerical_flux(const State& left, const State& right, int axis, const PhysicsSystem& system) {
  check_axis(axis);
  State f{};
  if (const auto* e = std::get_if<Euler>(&system.kind())) {
    State fl{}, fr{};
    double sl = 0.0, sr = 0.0;
    if (!pointwise::euler_side(left.data(), 1 + axis, e->gamma, fl.data(), sl))
      require_physical(left, e->gamma, "numerical_flux (left state)");
    if (!pointwise::euler_side(right.data(), 1 + axis, e->gamma, fr.data(), sr))
      require_physical(right, e->gamma, "numerical_flux (right state)");
    const double half = 0.5 * pointwise::max2(sl, sr);
    for (int v = 0; v < 5; ++v) f[v] = pointwise::rusanov(fl[v], fr[v], half, left[v], right[v]);
  } else {
    const double vel = std::get<Advection>(system.kind()).velocity[axis];
    const double half = 0.5 * std::fabs(vel);
    f[0] = pointwise::rusanov(vel * left[0], vel * right[0], half, left[0], right[0]);
  }
  return f;
}

double max_signal_speed(const State& u, int axis, const PhysicsSystem& system) {
  check_axis(axis);
  if (const auto* e = std::get_if<Euler>(&system.kind())) {
    State f{};
    double speed = 0.0;
    if (!pointwise::euler_side(u.data(), 1 + axis, e->gamma, f.data(), speed))
      require_physical(u, e->gamma, "max_signal_speed");
    return speed;
  }
  return std::fabs(std::get<Advection>(system.kind()).velocity[axis]);
}

}  // namespace halolab
