#pragma once

// Uniform Cartesian grid, block decomposition and periodic face topology.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace halolab {

enum class Axis : int { x = 0, y = 1, z = 2 };

// Face index order is part of the tag scheme: tag = morton(dest) * 6 + face.
enum class Face : int { x_minus = 0, x_plus = 1, y_minus = 2, y_plus = 3, z_minus = 4, z_plus = 5 };

inline constexpr int kNumFaces = 6;
inline constexpr std::array<Face, kNumFaces> kAllFaces = {Face::x_minus, Face::x_plus, Face::y_minus,
                                                          Face::y_plus,  Face::z_minus, Face::z_plus};

constexpr int face_index(Face f) { return static_cast<int>(f); }
constexpr int face_axis(Face f) { return static_cast<int>(f) / 2; }
constexpr bool face_is_plus(Face f) { return (static_cast<int>(f) & 1) != 0; }
constexpr Face opposite(Face f) { return static_cast<Face>(static_cast<int>(f) ^ 1); }
const char* to_string(Face f);

struct GridConfig {
  int nx = 64;
  int ny = 64;
  int nz = 64;
  int block = 16;
  int nghost = 2;
  std::array<double, 3> extent{1.0, 1.0, 1.0};

  // Throws ConfigError with a message naming the offending field.
  void validate() const;

  std::array<int, 3> cells() const { return {nx, ny, nz}; }
  std::array<int, 3> block_counts() const { return {nx / block, ny / block, nz / block}; }
  int total_blocks() const { return (nx / block) * (ny / block) * (nz / block); }
  std::int64_t interior_cells() const {
    return static_cast<std::int64_t>(nx) * ny * nz;
  }
  std::array<double, 3> spacing() const {
    return {extent[0] / nx, extent[1] / ny, extent[2] / nz};
  }

  static GridConfig cube(int n, int block);

  bool operator==(const GridConfig&) const = default;
};

struct BlockCoord {
  int i = 0;
  int j = 0;
  int k = 0;

  auto operator<=>(const BlockCoord&) const = default;
};

struct BlockId {
  BlockCoord coord;
  std::uint64_t morton = 0;

  bool operator==(const BlockId&) const = default;
};

// Interleaves the low 21 bits of each coordinate; x occupies bit 3i, y bit
// 3i+1, z bit 3i+2. Throws DomainError for coordinates that do not fit.
std::uint64_t morton_encode(std::uint32_t ib, std::uint32_t jb, std::uint32_t kb);
BlockCoord morton_decode(std::uint64_t code);

// Range-checked against the grid's block index box.
std::uint64_t morton_encode(const GridConfig& grid, const BlockCoord& c);
BlockId make_block_id(const GridConfig& grid, const BlockCoord& c);

BlockId face_neighbor(const GridConfig& grid, const BlockId& id, Face face);

// Morton-ordered, contiguous, balanced assignment of blocks to ranks.
class Decomposition {
 public:
  Decomposition(const GridConfig& grid, int nranks);

  const GridConfig& grid() const { return grid_; }
  int nranks() const { return nranks_; }

  int owner(const BlockCoord& c) const;
  // Blocks of one rank in Morton order.
  std::span<const BlockId> blocks_of(int rank) const;
  // All blocks in Morton order.
  std::span<const BlockId> morton_order() const { return order_; }

 private:
  std::size_t linear(const BlockCoord& c) const;

  GridConfig grid_;
  int nranks_;
  std::vector<BlockId> order_;
  std::vector<std::size_t> rank_begin_;
  std::vector<int> owner_;
};

// Throws ConfigError when nranks exceeds the block count.
Decomposition decompose(const GridConfig& grid, int nranks);

}  // namespace halolab
