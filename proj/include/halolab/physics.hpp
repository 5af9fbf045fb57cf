#pragma once

// Proxy hyperbolic systems (scalar advection, ideal-gas Euler), the minmod
// limiter, and the Rusanov (local Lax-Friedrichs) interface flux.

#include <array>
#include <cmath>
#include <span>
#include <variant>

namespace halolab {

inline constexpr int kMaxVars = 5;
using State = std::array<double, kMaxVars>;

struct Advection {
  std::array<double, 3> velocity{1.0, 0.0, 0.0};
};

struct Euler {
  double gamma = 1.4;
};

// Flattened parameters handed to the flux kernels.
struct KernelPhysics {
  enum class Kind { advection, euler };
  Kind kind = Kind::advection;
  std::array<double, 3> velocity{0.0, 0.0, 0.0};
  double gamma = 1.4;
};

class PhysicsSystem {
 public:
  static PhysicsSystem advection(std::array<double, 3> velocity);
  static PhysicsSystem euler(double gamma = 1.4);

  bool is_euler() const { return std::holds_alternative<Euler>(kind_); }
  int nvar() const { return is_euler() ? 5 : 1; }
  const std::variant<Advection, Euler>& kind() const { return kind_; }
  KernelPhysics kernel_params() const;

 private:
  explicit PhysicsSystem(std::variant<Advection, Euler> k) : kind_(k) {}
  std::variant<Advection, Euler> kind_;
};

enum class Reconstruction { first_order, plm_minmod };

struct SolverConfig {
  static constexpr int kSubsteps = 2;

  Reconstruction reconstruction = Reconstruction::plm_minmod;
  double cfl = 0.4;
  // Returned by compute_dt when every signal speed is zero.
  double dt_max = 1e-2;

  void validate() const;
};

double minmod(double a, double b);

// Interface states of every cell of `line` except the first and last (those
// lack a neighbour): minus[c] is the state at the cell's lower face, plus[c]
// at its upper face. Entries 0 and n-1 of the outputs are left untouched.
void reconstruct_axis(std::span<const double> line, Reconstruction recon, std::span<double> minus,
                      std::span<double> plus);

// Analytic flux along `axis`. Throws SolverError for non-physical Euler states.
State physical_flux(const State& u, int axis, const PhysicsSystem& system);

// Rusanov flux: F = 1/2 (F(uL) + F(uR)) - 1/2 smax (uR - uL).
State numerical_flux(const State& left, const State& right, int axis, const PhysicsSystem& system);

// advection: |v_axis|; euler: |v_axis| + sqrt(gamma p / rho).
double max_signal_speed(const State& u, int axis, const PhysicsSystem& system);

// Ideal-gas helpers on conserved variables (rho, mx, my, mz, E).
double euler_pressure(const State& u, double gamma);
State euler_conserved(double rho, std::array<double, 3> velocity, double pressure, double gamma);

namespace pointwise {

// Shared by the scalar kernel and the public API; the SIMD kernels replicate
// this exact operation order so all variants agree bitwise.

inline double minmod(double a, double b) {
  if ((a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)) return std::fabs(a) < std::fabs(b) ? a : b;
  return 0.0;
}

// States on either side of the face between cells c-1 and c, given cells
// c-2 .. c+1.
inline void plm_face(double um2, double um1, double u0, double up1, double& left, double& right) {
  left = um1 + 0.5 * minmod(u0 - um1, um1 - um2);
  right = u0 - 0.5 * minmod(up1 - u0, u0 - um1);
}

inline double pressure(double rho, double mx, double my, double mz, double energy, double gamma) {
  const double kinetic = (0.5 * ((mx * mx + my * my) + mz * mz)) / rho;
  return (gamma - 1.0) * (energy - kinetic);
}

inline double max2(double a, double b) { return a > b ? a : b; }

// Flux of one Euler state along the axis whose momentum sits at u[normal].
// Returns false for rho <= 0 or p <= 0 (including NaN).
inline bool euler_side(const double* u, int normal, double gamma, double* flux, double& speed) {
  const double rho = u[0];
  const double p = pressure(rho, u[1], u[2], u[3], u[4], gamma);
  if (!(rho > 0.0) || !(p > 0.0)) return false;
  const double vn = u[normal] / rho;
  flux[0] = u[normal];
  flux[1] = u[1] * vn;
  flux[2] = u[2] * vn;
  flux[3] = u[3] * vn;
  flux[normal] = flux[normal] + p;
  flux[4] = (u[4] + p) * vn;
  speed = std::fabs(vn) + std::sqrt((gamma * p) / rho);
  return true;
}

inline double rusanov(double fl, double fr, double half_speed, double ul, double ur) {
  return 0.5 * (fl + fr) - half_speed * (ur - ul);
}

}  // namespace pointwise

}  // namespace halolab
