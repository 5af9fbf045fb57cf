#include <algorithm>
#include <cmath>

#include "halolab/error.hpp"
#include "halolab/oracle.hpp"

namespace halolab::oracle {

namespace {

struct Field {
  int nx, ny, nz, nvar;
  std::vector<double> data;

  std::size_t at(int v, int i, int j, int k) const {
    i = (i % nx + nx) % nx;
    j = (j % ny + ny) % ny;
    k = (k % nz + nz) % nz;
    return ((static_cast<std::size_t>(v) * nz + k) * ny + j) * nx + i;
  }
  double get(int v, int i, int j, int k) const { return data[at(v, i, j, k)]; }
};

double limited_slope(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

double pressure_of(const double* u, double gamma) {
  const double ke = 0.5 * ((u[1] * u[1] + u[2] * u[2]) + u[3] * u[3]) / u[0];
  return (gamma - 1.0) * (u[4] - ke);
}

// Rusanov flux through a face normal to `axis`.
void face_flux(const RunConfig& cfg, int axis, const double* ul, const double* ur, double* f) {
  if (!cfg.system.is_euler()) {
    const double a = std::get<Advection>(cfg.system.kind()).velocity[axis];
    f[0] = 0.5 * (a * ul[0] + a * ur[0]) - 0.5 * std::abs(a) * (ur[0] - ul[0]);
    return;
  }
  const double gamma = std::get<Euler>(cfg.system.kind()).gamma;
  double fl[5], fr[5], sl, sr;
  auto side = [&](const double* u, double* fx, double& s) {
    const double p = pressure_of(u, gamma);
    if (!(u[0] > 0.0) || !(p > 0.0)) throw SolverError("reference solver: non-physical state");
    const double vn = u[1 + axis] / u[0];
    for (int v = 0; v < 5; ++v) fx[v] = u[v] * vn;
    fx[1 + axis] += p;
    fx[4] = (u[4] + p) * vn;
    s = std::abs(vn) + std::sqrt(gamma * p / u[0]);
  };
  side(ul, fl, sl);
  side(ur, fr, sr);
  const double smax = std::max(sl, sr);
  for (int v = 0; v < 5; ++v) f[v] = 0.5 * (fl[v] + fr[v]) - 0.5 * smax * (ur[v] - ul[v]);
}

double stable_dt(const RunConfig& cfg, const Field& u, const std::array<double, 3>& h) {
  double rate = 0.0;
  if (!cfg.system.is_euler()) {
    const auto& a = std::get<Advection>(cfg.system.kind()).velocity;
    for (int d = 0; d < 3; ++d) rate = std::max(rate, std::abs(a[d]) / h[d]);
  } else {
    const double gamma = std::get<Euler>(cfg.system.kind()).gamma;
    for (int k = 0; k < u.nz; ++k)
      for (int j = 0; j < u.ny; ++j)
        for (int i = 0; i < u.nx; ++i) {
          double s[5];
          for (int v = 0; v < 5; ++v) s[v] = u.get(v, i, j, k);
          const double c = std::sqrt(gamma * pressure_of(s, gamma) / s[0]);
          for (int d = 0; d < 3; ++d) rate = std::max(rate, (std::abs(s[1 + d] / s[0]) + c) / h[d]);
        }
  }
  return rate == 0.0 ? cfg.solver.dt_max : cfg.solver.cfl / rate;
}

// L(u) * dt, i.e. the flux-difference increment, for every cell.
std::vector<double> increment(const RunConfig& cfg, const Field& u, double dt, const std::array<double, 3>& h) {
  const bool plm = cfg.solver.reconstruction == Reconstruction::plm_minmod;
  std::vector<double> inc(u.data.size(), 0.0);
  std::vector<double> flux(u.data.size());
  for (int axis = 0; axis < 3; ++axis) {
    const int di = axis == 0, dj = axis == 1, dk = axis == 2;
    // flux[v](cell) is the flux through the cell's lower face on this axis
    for (int k = 0; k < u.nz; ++k)
      for (int j = 0; j < u.ny; ++j)
        for (int i = 0; i < u.nx; ++i) {
          double ul[5], ur[5], f[5];
          for (int v = 0; v < u.nvar; ++v) {
            const double m2 = u.get(v, i - 2 * di, j - 2 * dj, k - 2 * dk);
            const double m1 = u.get(v, i - di, j - dj, k - dk);
            const double c0 = u.get(v, i, j, k);
            const double p1 = u.get(v, i + di, j + dj, k + dk);
            ul[v] = plm ? m1 + 0.5 * limited_slope(c0 - m1, m1 - m2) : m1;
            ur[v] = plm ? c0 - 0.5 * limited_slope(p1 - c0, c0 - m1) : c0;
          }
          face_flux(cfg, axis, ul, ur, f);
          for (int v = 0; v < u.nvar; ++v) flux[u.at(v, i, j, k)] = f[v];
        }
    for (int v = 0; v < u.nvar; ++v)
      for (int k = 0; k < u.nz; ++k)
        for (int j = 0; j < u.ny; ++j)
          for (int i = 0; i < u.nx; ++i) {
            const std::size_t p = u.at(v, i, j, k);
            const double diff = flux[u.at(v, i + di, j + dj, k + dk)] - flux[p];
            inc[p] = inc[p] + diff * dt / h[axis];
          }
  }
  return inc;
}

}  // namespace

ReferenceResult serial_reference(const RunConfig& cfg) {
  cfg.grid.validate();
  const auto h = cfg.grid.spacing();
  Field u{cfg.grid.nx, cfg.grid.ny, cfg.grid.nz, cfg.system.nvar(), {}};
  u.data.assign(static_cast<std::size_t>(u.nvar) * static_cast<std::size_t>(cfg.grid.interior_cells()), 0.0);
  for (int k = 0; k < u.nz; ++k)
    for (int j = 0; j < u.ny; ++j)
      for (int i = 0; i < u.nx; ++i) {
        const State s = initial_state(cfg, (i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]);
        for (int v = 0; v < u.nvar; ++v) u.data[u.at(v, i, j, k)] = s[v];
      }

  ReferenceResult out;
  double t = 0.0;
  for (int step = 0;; ++step) {
    if (cfg.end_time ? !(t < *cfg.end_time) : step >= cfg.steps) break;
    double dt = stable_dt(cfg, u, h);
    bool last = false;
    if (cfg.end_time && dt >= *cfg.end_time - t) {
      dt = *cfg.end_time - t;
      last = true;
    }
    const std::vector<double> u0 = u.data;
    const auto inc0 = increment(cfg, u, dt, h);
    for (std::size_t p = 0; p < u.data.size(); ++p) u.data[p] = u0[p] - inc0[p];
    const auto inc1 = increment(cfg, u, dt, h);
    for (std::size_t p = 0; p < u.data.size(); ++p) u.data[p] = 0.5 * u0[p] + 0.5 * (u.data[p] - inc1[p]);
    t = last ? *cfg.end_time : t + dt;
    ++out.steps;
  }
  out.field = std::move(u.data);
  out.time = t;
  return out;
}

}  // namespace halolab::oracle
