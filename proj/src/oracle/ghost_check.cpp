#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "halolab/oracle.hpp"

namespace halolab::oracle {

namespace {

double tag_value(const GridConfig& grid, int v, int gx, int gy, int gz) {
  return v * 1e7 + (static_cast<double>(gz) * grid.ny + gy) * grid.nx + gx;
}

int wrap(int x, int n) { return (x % n + n) % n; }

}  // namespace

GhostCheck check_ghosts(const GridConfig& grid, std::span<const Block> blocks) {
  std::map<std::uint64_t, const Block*> by_morton;
  for (const Block& b : blocks) by_morton[b.id().morton] = &b;

  GhostCheck out;
  const int b = grid.block;
  const int g = grid.nghost;
  const int n = b + 2 * g;
  const int dims[3] = {grid.nx, grid.ny, grid.nz};
  for (const Block& blk : blocks) {
    const int origin[3] = {blk.id().coord.i * b, blk.id().coord.j * b, blk.id().coord.k * b};
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const int local[3] = {i, j, k};
          int outside = 0;
          for (int a = 0; a < 3; ++a) outside += (local[a] < g || local[a] >= g + b) ? 1 : 0;
          if (outside != 1) continue;  // interior, edge or corner
          int global[3];
          for (int a = 0; a < 3; ++a) global[a] = wrap(origin[a] + local[a] - g, dims[a]);
          const BlockCoord owner{global[0] / b, global[1] / b, global[2] / b};
          const Block* src = by_morton.at(morton_encode(grid, owner));
          for (int v = 0; v < blk.shape().nvar; ++v) {
            const double want = src->interior(v, global[0] % b, global[1] % b, global[2] % b);
            const double got = blk.at(v, i, j, k);
            ++out.checked;
            if (!(got == want)) {
              if (out.mismatches == 0) {
                std::ostringstream s;
                s << "block (" << blk.id().coord.i << "," << blk.id().coord.j << "," << blk.id().coord.k
                  << ") ghost (" << i << "," << j << "," << k << ") var " << v << ": got " << got << ", want "
                  << want;
                out.first_mismatch = s.str();
              }
              ++out.mismatches;
            }
          }
        }
  }
  return out;
}

GhostCheck run_ghost_check(const GhostRun& run) {
  run.grid.validate();
  const Decomposition decomp(run.grid, run.ranks);
  const BlockShape shape{run.nvar, run.grid.block, run.grid.nghost};
  std::vector<Block> all;
  std::mutex mu;
  RuntimeOptions options;
  options.path = run.path;

  spawn_ranks(run.ranks, run.threads, options, [&](RankContext& ctx) {
    std::vector<Block> blocks;
    for (const BlockId& id : decomp.blocks_of(ctx.rank())) {
      Block& blk = blocks.emplace_back(id, ctx.rank(), shape);
      for (double& x : blk.data()) x = std::numeric_limits<double>::quiet_NaN();
      const int b = run.grid.block;
      for (int v = 0; v < run.nvar; ++v)
        for (int kk = 0; kk < b; ++kk)
          for (int jj = 0; jj < b; ++jj)
            for (int ii = 0; ii < b; ++ii)
              blk.interior(v, ii, jj, kk) =
                  tag_value(run.grid, v, id.coord.i * b + ii, id.coord.j * b + jj, id.coord.k * b + kk);
    }
    HaloPlan plan = build_plan(decomp, ctx.rank(), run.nvar);
    if (run.drop_one_transfer && ctx.rank() == 0) {
      if (!plan.local_copies.empty())
        plan.local_copies.erase(plan.local_copies.begin());
      else if (!plan.remote_recvs.empty())
        plan.remote_recvs.erase(plan.remote_recvs.begin());
    }
    PhaseTimes times;
    exchange(run.strategy, ctx, plan, blocks, times, run.scheduling);
    std::lock_guard lock(mu);
    for (auto& b : blocks) all.push_back(std::move(b));
  });
  return check_ghosts(run.grid, all);
}

}  // namespace halolab::oracle
