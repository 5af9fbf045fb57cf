#pragma once

// Ghost-cell exchange over face slabs: a precomputed plan that splits every
// ghost fill into local (same rank, direct slab copy) and remote (transport)
// operations, and the two execution strategies built on it.

#include <span>
#include <string>
#include <vector>

#include "halolab/block.hpp"
#include "halolab/grid.hpp"
#include "halolab/metrics.hpp"
#include "halolab/runtime.hpp"

namespace halolab {

enum class ExchangeStrategy { fused, split_overlap };

std::string to_string(ExchangeStrategy s);
ExchangeStrategy parse_exchange_strategy(const std::string& text);

// Block indices refer to Decomposition::blocks_of(rank) order.
struct LocalCopy {
  std::size_t src_block = 0;
  FaceSlab src_slab;
  std::size_t dst_block = 0;
  FaceSlab dst_slab;
};

struct RemoteSend {
  int dest_rank = 0;
  int tag = 0;
  std::size_t src_block = 0;
  FaceSlab slab;
};

struct RemoteRecv {
  int src_rank = 0;
  int tag = 0;
  std::size_t dst_block = 0;
  FaceSlab slab;
};

struct HaloPlan {
  int rank = 0;
  BlockShape shape;
  std::vector<LocalCopy> local_copies;
  std::vector<RemoteSend> remote_sends;
  std::vector<RemoteRecv> remote_recvs;

  // Values per face message: nvar * g * B^2.
  std::size_t message_values() const {
    return static_cast<std::size_t>(shape.nvar) * shape.nghost * shape.block * shape.block;
  }
};

// Tag of the message filling `face` ghosts of the block with Morton index `morton`.
constexpr int halo_tag(std::uint64_t morton, Face face) {
  return static_cast<int>(morton * kNumFaces + static_cast<std::uint64_t>(face_index(face)));
}

// Ordering: Morton order of the block, then face index.
HaloPlan build_plan(const Decomposition& decomp, int rank, int nvar);

std::vector<double> pack_face(const Block& block, const FaceSlab& slab);
void pack_face_into(const Block& block, const FaceSlab& slab, std::span<double> out);
// Throws ProtocolError when the payload length differs from the slab volume.
void unpack_face(Block& block, const FaceSlab& slab, std::span<const double> payload);
void copy_slab(const Block& src, const FaceSlab& src_slab, Block& dst, const FaceSlab& dst_slab);

// Serial baseline on the main context: post receives, pack+send, local
// copies, wait_all, unpack. Never touches the pool.
void exchange_fused(RankContext& ctx, const HaloPlan& plan, std::span<Block> blocks, PhaseTimes& times);

// Receives posted first; packs run on the pool while the main context posts
// each send as its pack completes; local copies run on the pool before
// wait_all; unpacks run on the pool afterwards.
void exchange_split_overlap(RankContext& ctx, const HaloPlan& plan, std::span<Block> blocks, PhaseTimes& times,
                            Scheduling sched = Scheduling::dynamic(1));

void exchange(ExchangeStrategy strategy, RankContext& ctx, const HaloPlan& plan, std::span<Block> blocks,
              PhaseTimes& times, Scheduling sched);

}  // namespace halolab
