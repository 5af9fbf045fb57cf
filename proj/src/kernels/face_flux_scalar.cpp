#include "halolab/kernels.hpp"

namespace halolab::kernels {

namespace {

inline void face_states(const FaceFluxArgs& a, const double* u, std::size_t p, double& left, double& right) {
  const std::ptrdiff_t s = a.stride;
  const double* c = u + p;
  if (a.recon == Reconstruction::first_order) {
    left = c[-s];
    right = c[0];
  } else {
    pointwise::plm_face(c[-2 * s], c[-s], c[0], c[s], left, right);
  }
}

std::size_t advection_row(const FaceFluxArgs& a, std::size_t begin, std::size_t count) {
  const double vel = a.physics.velocity[a.axis];
  const double half = 0.5 * std::fabs(vel);
  for (std::size_t p = begin; p < begin + count; ++p) {
    double ul, ur;
    face_states(a, a.u, p, ul, ur);
    a.flux[p] = pointwise::rusanov(vel * ul, vel * ur, half, ul, ur);
  }
  return count;
}

std::size_t euler_row(const FaceFluxArgs& a, std::size_t begin, std::size_t count) {
  const int normal = 1 + a.axis;
  for (std::size_t p = begin; p < begin + count; ++p) {
    double ul[5], ur[5], fl[5], fr[5];
    for (int v = 0; v < 5; ++v) face_states(a, a.u + v * a.var_stride, p, ul[v], ur[v]);
    double sl, sr;
    if (!pointwise::euler_side(ul, normal, a.physics.gamma, fl, sl) ||
        !pointwise::euler_side(ur, normal, a.physics.gamma, fr, sr))
      return p - begin;
    const double half = 0.5 * pointwise::max2(sl, sr);
    for (int v = 0; v < 5; ++v) a.flux[v * a.var_stride + p] = pointwise::rusanov(fl[v], fr[v], half, ul[v], ur[v]);
  }
  return count;
}

}  // namespace

std::size_t face_row_scalar(const FaceFluxArgs& args, std::size_t begin, std::size_t count) {
  if (args.physics.kind == KernelPhysics::Kind::euler) return euler_row(args, begin, count);
  return advection_row(args, begin, count);
}

}  // namespace halolab::kernels
