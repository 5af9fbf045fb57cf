#include "halolab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "halolab/error.hpp"

namespace halolab {

namespace {

constexpr std::uint32_t kMortonCoordLimit = 1u << 21;

std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | (v << 32)) & 0x1f00000000ffffULL;
  v = (v | (v << 16)) & 0x1f0000ff0000ffULL;
  v = (v | (v << 8)) & 0x100f00f00f00f00fULL;
  v = (v | (v << 4)) & 0x10c30c30c30c30c3ULL;
  v = (v | (v << 2)) & 0x1249249249249249ULL;
  return v;
}

std::uint32_t compact_bits(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffff;
  return static_cast<std::uint32_t>(v);
}

int wrap(int v, int n) { return ((v % n) + n) % n; }

}  // namespace

const char* to_string(Face f) {
  switch (f) {
    case Face::x_minus: return "-x";
    case Face::x_plus: return "+x";
    case Face::y_minus: return "-y";
    case Face::y_plus: return "+y";
    case Face::z_minus: return "-z";
    case Face::z_plus: return "+z";
  }
  return "?";
}

void GridConfig::validate() const {
  if (block <= 0) throw ConfigError("block size must be positive (got " + std::to_string(block) + ")");
  const char* names[3] = {"nx", "ny", "nz"};
  const int n[3] = {nx, ny, nz};
  for (int a = 0; a < 3; ++a) {
    if (n[a] <= 0)
      throw ConfigError(std::string(names[a]) + " must be positive (got " + std::to_string(n[a]) + ")");
    if (n[a] % block != 0)
      throw ConfigError(std::string(names[a]) + " (" + std::to_string(n[a]) +
                        ") is not divisible by block (" + std::to_string(block) + ")");
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a]))
      throw ConfigError("domain extent along axis " + std::to_string(a) + " must be positive");
  }
  if (nghost != 2) throw ConfigError("ghost width must be 2 (got " + std::to_string(nghost) + ")");
  if (block < nghost)
    throw ConfigError("block (" + std::to_string(block) + ") must be at least the ghost width");
}

GridConfig GridConfig::cube(int n, int block) {
  GridConfig g;
  g.nx = g.ny = g.nz = n;
  g.block = block;
  return g;
}

std::uint64_t morton_encode(std::uint32_t ib, std::uint32_t jb, std::uint32_t kb) {
  if (ib >= kMortonCoordLimit || jb >= kMortonCoordLimit || kb >= kMortonCoordLimit)
    throw DomainError("morton_encode: coordinate exceeds 21 bits");
  return spread_bits(ib) | (spread_bits(jb) << 1) | (spread_bits(kb) << 2);
}

BlockCoord morton_decode(std::uint64_t code) {
  return {static_cast<int>(compact_bits(code)), static_cast<int>(compact_bits(code >> 1)),
          static_cast<int>(compact_bits(code >> 2))};
}

std::uint64_t morton_encode(const GridConfig& grid, const BlockCoord& c) {
  const auto nb = grid.block_counts();
  if (c.i < 0 || c.j < 0 || c.k < 0 || c.i >= nb[0] || c.j >= nb[1] || c.k >= nb[2])
    throw DomainError("morton_encode: block (" + std::to_string(c.i) + "," + std::to_string(c.j) + "," +
                      std::to_string(c.k) + ") outside block range");
  return morton_encode(static_cast<std::uint32_t>(c.i), static_cast<std::uint32_t>(c.j),
                       static_cast<std::uint32_t>(c.k));
}

BlockId make_block_id(const GridConfig& grid, const BlockCoord& c) {
  return {c, morton_encode(grid, c)};
}

BlockId face_neighbor(const GridConfig& grid, const BlockId& id, Face face) {
  const auto nb = grid.block_counts();
  BlockCoord c = id.coord;
  const int step = face_is_plus(face) ? 1 : -1;
  switch (face_axis(face)) {
    case 0: c.i = wrap(c.i + step, nb[0]); break;
    case 1: c.j = wrap(c.j + step, nb[1]); break;
    default: c.k = wrap(c.k + step, nb[2]); break;
  }
  return make_block_id(grid, c);
}

Decomposition::Decomposition(const GridConfig& grid, int nranks) : grid_(grid), nranks_(nranks) {
  grid_.validate();
  const int total = grid_.total_blocks();
  if (nranks < 1) throw ConfigError("ranks must be at least 1");
  if (nranks > total)
    throw ConfigError("ranks (" + std::to_string(nranks) + ") exceed the number of blocks (" +
                      std::to_string(total) + ")");

  const auto nb = grid_.block_counts();
  order_.reserve(static_cast<std::size_t>(total));
  for (int k = 0; k < nb[2]; ++k)
    for (int j = 0; j < nb[1]; ++j)
      for (int i = 0; i < nb[0]; ++i) order_.push_back(make_block_id(grid_, {i, j, k}));
  std::sort(order_.begin(), order_.end(),
            [](const BlockId& a, const BlockId& b) { return a.morton < b.morton; });

  // The first (total % nranks) ranks take one extra block.
  const std::size_t base = static_cast<std::size_t>(total / nranks);
  const std::size_t extra = static_cast<std::size_t>(total % nranks);
  rank_begin_.resize(static_cast<std::size_t>(nranks) + 1);
  rank_begin_[0] = 0;
  for (std::size_t r = 0; r < static_cast<std::size_t>(nranks); ++r)
    rank_begin_[r + 1] = rank_begin_[r] + base + (r < extra ? 1 : 0);

  owner_.assign(static_cast<std::size_t>(total), -1);
  for (int r = 0; r < nranks; ++r)
    for (auto p = rank_begin_[r]; p < rank_begin_[r + 1]; ++p) owner_[linear(order_[p].coord)] = r;
}

std::size_t Decomposition::linear(const BlockCoord& c) const {
  const auto nb = grid_.block_counts();
  return (static_cast<std::size_t>(c.k) * nb[1] + c.j) * nb[0] + c.i;
}

int Decomposition::owner(const BlockCoord& c) const {
  const auto nb = grid_.block_counts();
  if (c.i < 0 || c.j < 0 || c.k < 0 || c.i >= nb[0] || c.j >= nb[1] || c.k >= nb[2])
    throw DomainError("owner: block coordinate outside grid");
  return owner_[linear(c)];
}

std::span<const BlockId> Decomposition::blocks_of(int rank) const {
  if (rank < 0 || rank >= nranks_) throw DomainError("blocks_of: invalid rank " + std::to_string(rank));
  return std::span<const BlockId>(order_).subspan(rank_begin_[rank], rank_begin_[rank + 1] - rank_begin_[rank]);
}

Decomposition decompose(const GridConfig& grid, int nranks) { return Decomposition(grid, nranks); }

}  // namespace halolab
