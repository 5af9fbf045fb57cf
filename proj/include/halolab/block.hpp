#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "halolab/grid.hpp"

namespace halolab {

// Ghost-inclusive extent of one block: (B + 2g) cells per axis, nvar planes,
// x fastest.
struct BlockShape {
  int nvar = 1;
  int block = 16;
  int nghost = 2;

  int extent() const { return block + 2 * nghost; }
  std::size_t var_stride() const {
    const auto n = static_cast<std::size_t>(extent());
    return n * n * n;
  }
  std::size_t size() const { return var_stride() * static_cast<std::size_t>(nvar); }
  std::ptrdiff_t axis_stride(int axis) const {
    const auto n = static_cast<std::ptrdiff_t>(extent());
    return axis == 0 ? 1 : (axis == 1 ? n : n * n);
  }
  std::size_t index(int v, int i, int j, int k) const {
    const auto n = static_cast<std::size_t>(extent());
    return static_cast<std::size_t>(v) * var_stride() + (static_cast<std::size_t>(k) * n + j) * n + i;
  }
  bool operator==(const BlockShape&) const = default;
};

// Half-open box [lo, hi) in ghost-inclusive coordinates, covering all
// variables. Payload layout: variable-major, then z, y, x fastest.
struct FaceSlab {
  Face face = Face::x_minus;
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};

  std::size_t cells() const {
    return static_cast<std::size_t>(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  }
  bool operator==(const FaceSlab&) const = default;
};

// The g interior layers adjacent to `face`.
FaceSlab interior_slab(const BlockShape& shape, Face face);
// The g ghost layers beyond `face`.
FaceSlab ghost_slab(const BlockShape& shape, Face face);

class Block {
 public:
  Block(BlockId id, int owner, const BlockShape& shape);

  const BlockId& id() const { return id_; }
  int owner() const { return owner_; }
  const BlockShape& shape() const { return shape_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& at(int v, int i, int j, int k) { return data_[shape_.index(v, i, j, k)]; }
  double at(int v, int i, int j, int k) const { return data_[shape_.index(v, i, j, k)]; }

  // Interior cell (ii, jj, kk) in [0, B).
  double& interior(int v, int ii, int jj, int kk) {
    const int g = shape_.nghost;
    return at(v, ii + g, jj + g, kk + g);
  }
  double interior(int v, int ii, int jj, int kk) const {
    const int g = shape_.nghost;
    return at(v, ii + g, jj + g, kk + g);
  }

 private:
  BlockId id_;
  int owner_;
  BlockShape shape_;
  std::vector<double> data_;
};

}  // namespace halolab
