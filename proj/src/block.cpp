#include "halolab/block.hpp"

namespace halolab {

namespace {

FaceSlab slab_at(const BlockShape& shape, Face face, int layer_begin) {
  const int g = shape.nghost;
  const int b = shape.block;
  FaceSlab s;
  s.face = face;
  s.lo = {g, g, g};
  s.hi = {g + b, g + b, g + b};
  const int axis = face_axis(face);
  s.lo[axis] = layer_begin;
  s.hi[axis] = layer_begin + g;
  return s;
}

}  // namespace

FaceSlab interior_slab(const BlockShape& shape, Face face) {
  const int g = shape.nghost;
  return slab_at(shape, face, face_is_plus(face) ? shape.block : g);
}

FaceSlab ghost_slab(const BlockShape& shape, Face face) {
  return slab_at(shape, face, face_is_plus(face) ? shape.block + shape.nghost : 0);
}

Block::Block(BlockId id, int owner, const BlockShape& shape)
    : id_(id), owner_(owner), shape_(shape), data_(shape.size(), 0.0) {}

}  // namespace halolab
