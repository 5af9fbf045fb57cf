#include "halolab/solver.hpp"

#include <algorithm>
#include <string>

#include "halolab/error.hpp"
#include "halolab/kernels.hpp"

namespace halolab {

namespace {

[[noreturn]] void throw_non_physical(const Block& block, std::size_t p, const char* what) {
  const auto& s = block.shape();
  const auto n = static_cast<std::size_t>(s.extent());
  const std::size_t cell = p % s.var_stride();
  const int i = static_cast<int>(cell % n);
  const int j = static_cast<int>((cell / n) % n);
  const int k = static_cast<int>(cell / (n * n));
  const auto& c = block.id().coord;
  throw SolverError(std::string(what) + " in block (" + std::to_string(c.i) + "," + std::to_string(c.j) + "," +
                        std::to_string(c.k) + ") morton " + std::to_string(block.id().morton) + " at cell (" +
                        std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")",
                    block.id().morton, i, j, k);
}

}  // namespace

StageWorkspace::StageWorkspace(const BlockShape& shape)
    : flux(shape.size(), 0.0), increment(shape.size(), 0.0), saved(shape.size(), 0.0) {}

void serial_block_loop(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

double compute_dt(std::span<const Block> blocks, const Scheme& scheme) {
  const auto& sys = scheme.system;
  double rate = 0.0;  // max over cells and axes of speed / dx
  if (!sys.is_euler()) {
    const auto& v = std::get<Advection>(sys.kind()).velocity;
    if (!blocks.empty())
      for (int a = 0; a < 3; ++a) rate = std::max(rate, std::fabs(v[a]) / scheme.spacing[a]);
  } else {
    const double gamma = std::get<Euler>(sys.kind()).gamma;
    for (const Block& b : blocks) {
      const auto& s = b.shape();
      const int g = s.nghost;
      const auto vs = s.var_stride();
      const auto data = b.data();
      for (int k = g; k < g + s.block; ++k)
        for (int j = g; j < g + s.block; ++j)
          for (int i = g; i < g + s.block; ++i) {
            const std::size_t p = s.index(0, i, j, k);
            const double u[5] = {data[p], data[p + vs], data[p + 2 * vs], data[p + 3 * vs], data[p + 4 * vs]};
            const double pr = pointwise::pressure(u[0], u[1], u[2], u[3], u[4], gamma);
            if (!(u[0] > 0.0) || !(pr > 0.0)) throw_non_physical(b, p, "non-physical state");
            const double c = std::sqrt((gamma * pr) / u[0]);
            for (int a = 0; a < 3; ++a)
              rate = std::max(rate, (std::fabs(u[1 + a] / u[0]) + c) / scheme.spacing[a]);
          }
    }
  }
  if (rate == 0.0) return scheme.config.dt_max;
  return scheme.config.cfl / rate;
}

void compute_increment(const Block& block, StageWorkspace& ws, double dt, const Scheme& scheme) {
  const auto& s = block.shape();
  const int g = s.nghost;
  const int b = s.block;
  const FaceRowKernel kernel = face_row_kernel(active_isa());

  FaceFluxArgs args;
  args.u = block.data().data();
  args.flux = ws.flux.data();
  args.var_stride = s.var_stride();
  args.nvar = s.nvar;
  args.physics = scheme.system.kernel_params();
  args.recon = scheme.config.reconstruction;

  double* inc = ws.increment.data();
  const double* flux = ws.flux.data();

  for (int axis = 0; axis < 3; ++axis) {
    args.axis = axis;
    args.stride = s.axis_stride(axis);
    // Faces along `axis` span one extra layer on the upper side.
    const int j_end = g + b + (axis == 1 ? 1 : 0);
    const int k_end = g + b + (axis == 2 ? 1 : 0);
    const auto row = static_cast<std::size_t>(b + (axis == 0 ? 1 : 0));
    for (int rep = 0; rep < std::max(1, ws.flux_repeats); ++rep)
      for (int k = g; k < k_end; ++k)
        for (int j = g; j < j_end; ++j) {
          const std::size_t begin = s.index(0, g, j, k);
          const std::size_t done = kernel(args, begin, row);
          if (done != row) throw_non_physical(block, begin + done, "non-physical interface state");
        }

    const double dt_dx = dt / scheme.spacing[axis];
    const std::ptrdiff_t st = args.stride;
    for (int v = 0; v < s.nvar; ++v)
      for (int k = g; k < g + b; ++k)
        for (int j = g; j < g + b; ++j) {
          const std::size_t base = s.index(v, g, j, k);
          for (std::size_t p = base; p < base + static_cast<std::size_t>(b); ++p) {
            const double d = (flux[p + st] - flux[p]) * dt_dx;
            inc[p] = axis == 0 ? d : inc[p] + d;
          }
        }
  }
}

void update_block_stage(Block& block, StageWorkspace& ws, double dt, const Scheme& scheme) {
  compute_increment(block, ws, dt, scheme);
  const auto& s = block.shape();
  const int g = s.nghost;
  auto u = block.data();
  for (int v = 0; v < s.nvar; ++v)
    for (int k = g; k < g + s.block; ++k)
      for (int j = g; j < g + s.block; ++j) {
        const std::size_t base = s.index(v, g, j, k);
        for (std::size_t p = base; p < base + static_cast<std::size_t>(s.block); ++p) u[p] = u[p] - ws.increment[p];
      }
}

void rk2_stage(int stage, Block& block, StageWorkspace& ws, double dt, const Scheme& scheme) {
  if (stage == 0) {
    const auto u = block.data();
    std::copy(u.begin(), u.end(), ws.saved.begin());
    update_block_stage(block, ws, dt, scheme);
    return;
  }
  update_block_stage(block, ws, dt, scheme);
  const auto& s = block.shape();
  const int g = s.nghost;
  auto u = block.data();
  for (int v = 0; v < s.nvar; ++v)
    for (int k = g; k < g + s.block; ++k)
      for (int j = g; j < g + s.block; ++j) {
        const std::size_t base = s.index(v, g, j, k);
        for (std::size_t p = base; p < base + static_cast<std::size_t>(s.block); ++p)
          u[p] = 0.5 * ws.saved[p] + 0.5 * u[p];
      }
}

std::int64_t rk2_step(std::span<Block> blocks, std::span<StageWorkspace> workspaces, double dt,
                      const Scheme& scheme, const ExchangeCallback& exchange, const BlockLoop& loop) {
  if (workspaces.size() != blocks.size()) throw DomainError("rk2_step: one workspace per block required");
  std::int64_t cells = 0;
  for (const Block& b : blocks) {
    const auto n = static_cast<std::int64_t>(b.shape().block);
    cells += n * n * n;
  }
  for (int stage = 0; stage < SolverConfig::kSubsteps; ++stage) {
    exchange(stage);
    loop(blocks.size(), [&](std::size_t i) { rk2_stage(stage, blocks[i], workspaces[i], dt, scheme); });
  }
  return cells * SolverConfig::kSubsteps;
}

}  // namespace halolab
