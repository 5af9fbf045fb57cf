#include "halolab/exchange.hpp"

#include <algorithm>

#include "halolab/error.hpp"

namespace halolab {

namespace {

std::size_t local_index(std::span<const BlockId> blocks, std::uint64_t morton) {
  const auto it = std::lower_bound(blocks.begin(), blocks.end(), morton,
                                   [](const BlockId& b, std::uint64_t m) { return b.morton < m; });
  return static_cast<std::size_t>(it - blocks.begin());
}

// Calls row(offset_in_block, row_length, offset_in_payload) for each x-row of the slab.
template <class RowFn>
void for_each_row(const BlockShape& shape, const FaceSlab& slab, RowFn&& row) {
  const auto len = static_cast<std::size_t>(slab.hi[0] - slab.lo[0]);
  std::size_t out = 0;
  for (int v = 0; v < shape.nvar; ++v)
    for (int k = slab.lo[2]; k < slab.hi[2]; ++k)
      for (int j = slab.lo[1]; j < slab.hi[1]; ++j) {
        row(shape.index(v, slab.lo[0], j, k), len, out);
        out += len;
      }
}

}  // namespace

std::string to_string(ExchangeStrategy s) { return s == ExchangeStrategy::fused ? "fused" : "split-overlap"; }

ExchangeStrategy parse_exchange_strategy(const std::string& text) {
  if (text == "fused") return ExchangeStrategy::fused;
  if (text == "split-overlap" || text == "split_overlap") return ExchangeStrategy::split_overlap;
  throw ConfigError("unknown strategy '" + text + "' (expected fused or split-overlap)");
}

HaloPlan build_plan(const Decomposition& decomp, int rank, int nvar) {
  const auto& grid = decomp.grid();
  HaloPlan plan;
  plan.rank = rank;
  plan.shape = BlockShape{nvar, grid.block, grid.nghost};
  const auto mine = decomp.blocks_of(rank);

  for (std::size_t x = 0; x < mine.size(); ++x) {
    const BlockId& id = mine[x];
    for (Face f : kAllFaces) {
      const BlockId nb = face_neighbor(grid, id, f);
      const int nb_owner = decomp.owner(nb.coord);
      if (nb_owner == rank) {
        plan.local_copies.push_back(
            {local_index(mine, nb.morton), interior_slab(plan.shape, opposite(f)), x, ghost_slab(plan.shape, f)});
      } else {
        plan.remote_recvs.push_back({nb_owner, halo_tag(id.morton, f), x, ghost_slab(plan.shape, f)});
        plan.remote_sends.push_back(
            {nb_owner, halo_tag(nb.morton, opposite(f)), x, interior_slab(plan.shape, f)});
      }
    }
  }
  return plan;
}

void pack_face_into(const Block& block, const FaceSlab& slab, std::span<double> out) {
  const auto& shape = block.shape();
  if (out.size() != slab.cells() * static_cast<std::size_t>(shape.nvar))
    throw ProtocolError("pack_face: buffer length does not match slab");
  const auto data = block.data();
  for_each_row(shape, slab, [&](std::size_t src, std::size_t len, std::size_t dst) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(src), len, out.begin() + static_cast<std::ptrdiff_t>(dst));
  });
}

std::vector<double> pack_face(const Block& block, const FaceSlab& slab) {
  std::vector<double> out(slab.cells() * static_cast<std::size_t>(block.shape().nvar));
  pack_face_into(block, slab, out);
  return out;
}

void unpack_face(Block& block, const FaceSlab& slab, std::span<const double> payload) {
  const auto& shape = block.shape();
  const std::size_t expected = slab.cells() * static_cast<std::size_t>(shape.nvar);
  if (payload.size() != expected)
    throw ProtocolError("unpack_face: payload has " + std::to_string(payload.size()) + " values, slab needs " +
                        std::to_string(expected));
  auto data = block.data();
  for_each_row(shape, slab, [&](std::size_t dst, std::size_t len, std::size_t src) {
    std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(src), len,
                data.begin() + static_cast<std::ptrdiff_t>(dst));
  });
}

void copy_slab(const Block& src, const FaceSlab& src_slab, Block& dst, const FaceSlab& dst_slab) {
  const auto& shape = src.shape();
  const auto in = src.data();
  auto out = dst.data();
  const auto len = static_cast<std::size_t>(src_slab.hi[0] - src_slab.lo[0]);
  for (int v = 0; v < shape.nvar; ++v)
    for (int dk = 0; dk < src_slab.hi[2] - src_slab.lo[2]; ++dk)
      for (int dj = 0; dj < src_slab.hi[1] - src_slab.lo[1]; ++dj) {
        const auto s = shape.index(v, src_slab.lo[0], src_slab.lo[1] + dj, src_slab.lo[2] + dk);
        const auto d = shape.index(v, dst_slab.lo[0], dst_slab.lo[1] + dj, dst_slab.lo[2] + dk);
        std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(s), len, out.begin() + static_cast<std::ptrdiff_t>(d));
      }
}

void exchange_fused(RankContext& ctx, const HaloPlan& plan, std::span<Block> blocks, PhaseTimes& times) {
  std::vector<Request> requests;
  requests.reserve(plan.remote_recvs.size() + plan.remote_sends.size());
  {
    ScopedPhase phase(times, Phase::pack);
    for (const auto& r : plan.remote_recvs) requests.push_back(irecv(ctx, r.src_rank, r.tag));
    for (const auto& s : plan.remote_sends)
      requests.push_back(isend(ctx, s.dest_rank, s.tag, pack_face(blocks[s.src_block], s.slab)));
  }
  {
    ScopedPhase phase(times, Phase::local_copy);
    for (const auto& c : plan.local_copies) copy_slab(blocks[c.src_block], c.src_slab, blocks[c.dst_block], c.dst_slab);
  }
  std::vector<Payload> payloads;
  {
    ScopedPhase phase(times, Phase::comm_wait);
    payloads = wait_all(ctx, requests);
  }
  ScopedPhase phase(times, Phase::unpack);
  for (std::size_t i = 0; i < plan.remote_recvs.size(); ++i) {
    const auto& r = plan.remote_recvs[i];
    unpack_face(blocks[r.dst_block], r.slab, payloads[i]);
  }
}

void exchange_split_overlap(RankContext& ctx, const HaloPlan& plan, std::span<Block> blocks, PhaseTimes& times,
                            Scheduling sched) {
  auto& pool = ctx.pool();
  std::vector<Request> requests;
  requests.reserve(plan.remote_recvs.size() + plan.remote_sends.size());
  {
    ScopedPhase phase(times, Phase::pack);
    for (const auto& r : plan.remote_recvs) requests.push_back(irecv(ctx, r.src_rank, r.tag));
    std::vector<Payload> buffers(plan.remote_sends.size());
    pool.parallel_for_notify(
        plan.remote_sends.size(), sched,
        [&](std::size_t i) {
          const auto& s = plan.remote_sends[i];
          buffers[i] = pack_face(blocks[s.src_block], s.slab);
        },
        [&](std::size_t i) {
          const auto& s = plan.remote_sends[i];
          requests.push_back(isend(ctx, s.dest_rank, s.tag, std::move(buffers[i])));
        });
  }
  {
    ScopedPhase phase(times, Phase::local_copy);
    pool.parallel_for(plan.local_copies.size(), sched, [&](std::size_t i) {
      const auto& c = plan.local_copies[i];
      copy_slab(blocks[c.src_block], c.src_slab, blocks[c.dst_block], c.dst_slab);
    });
  }
  std::vector<Payload> payloads;
  {
    ScopedPhase phase(times, Phase::comm_wait);
    payloads = wait_all(ctx, requests);
  }
  ScopedPhase phase(times, Phase::unpack);
  pool.parallel_for(plan.remote_recvs.size(), sched, [&](std::size_t i) {
    const auto& r = plan.remote_recvs[i];
    unpack_face(blocks[r.dst_block], r.slab, payloads[i]);
  });
}

void exchange(ExchangeStrategy strategy, RankContext& ctx, const HaloPlan& plan, std::span<Block> blocks,
              PhaseTimes& times, Scheduling sched) {
  if (strategy == ExchangeStrategy::fused)
    exchange_fused(ctx, plan, blocks, times);
  else
    exchange_split_overlap(ctx, plan, blocks, times, sched);
}

}  // namespace halolab
