// AVX2 variant of the face-flux row kernel. Four faces per iteration along x;
// every lane performs exactly the operation sequence of the scalar kernel
// (no FMA, correctly rounded div/sqrt) so results agree bitwise.

#include <immintrin.h>

#include "halolab/kernels.hpp"

namespace halolab::kernels {

namespace {

inline __m256d abs_pd(__m256d a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }

inline __m256d minmod_pd(__m256d a, __m256d b) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d both_pos = _mm256_and_pd(_mm256_cmp_pd(a, zero, _CMP_GT_OQ), _mm256_cmp_pd(b, zero, _CMP_GT_OQ));
  const __m256d both_neg = _mm256_and_pd(_mm256_cmp_pd(a, zero, _CMP_LT_OQ), _mm256_cmp_pd(b, zero, _CMP_LT_OQ));
  const __m256d a_smaller = _mm256_cmp_pd(abs_pd(a), abs_pd(b), _CMP_LT_OQ);
  const __m256d pick = _mm256_blendv_pd(b, a, a_smaller);
  return _mm256_and_pd(pick, _mm256_or_pd(both_pos, both_neg));
}

inline void face_states(const FaceFluxArgs& a, const double* c, __m256d& left, __m256d& right) {
  const std::ptrdiff_t s = a.stride;
  const __m256d um1 = _mm256_loadu_pd(c - s);
  const __m256d u0 = _mm256_loadu_pd(c);
  if (a.recon == Reconstruction::first_order) {
    left = um1;
    right = u0;
    return;
  }
  const __m256d um2 = _mm256_loadu_pd(c - 2 * s);
  const __m256d up1 = _mm256_loadu_pd(c + s);
  const __m256d half = _mm256_set1_pd(0.5);
  left = _mm256_add_pd(um1, _mm256_mul_pd(half, minmod_pd(_mm256_sub_pd(u0, um1), _mm256_sub_pd(um1, um2))));
  right = _mm256_sub_pd(u0, _mm256_mul_pd(half, minmod_pd(_mm256_sub_pd(up1, u0), _mm256_sub_pd(u0, um1))));
}

inline __m256d rusanov_pd(__m256d fl, __m256d fr, __m256d half_speed, __m256d ul, __m256d ur) {
  return _mm256_sub_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_add_pd(fl, fr)),
                       _mm256_mul_pd(half_speed, _mm256_sub_pd(ur, ul)));
}

// Returns the mask of lanes holding a physical state.
inline __m256d euler_side_pd(const __m256d* u, int normal, double gamma, __m256d* f, __m256d& speed) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d rho = u[0];
  const __m256d kin_sum = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(u[1], u[1]), _mm256_mul_pd(u[2], u[2])),
                                        _mm256_mul_pd(u[3], u[3]));
  const __m256d kinetic = _mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), kin_sum), rho);
  const __m256d p = _mm256_mul_pd(_mm256_set1_pd(gamma - 1.0), _mm256_sub_pd(u[4], kinetic));
  const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(rho, zero, _CMP_GT_OQ), _mm256_cmp_pd(p, zero, _CMP_GT_OQ));
  const __m256d vn = _mm256_div_pd(u[normal], rho);
  f[0] = u[normal];
  f[1] = _mm256_mul_pd(u[1], vn);
  f[2] = _mm256_mul_pd(u[2], vn);
  f[3] = _mm256_mul_pd(u[3], vn);
  f[normal] = _mm256_add_pd(f[normal], p);
  f[4] = _mm256_mul_pd(_mm256_add_pd(u[4], p), vn);
  speed = _mm256_add_pd(abs_pd(vn), _mm256_sqrt_pd(_mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(gamma), p), rho)));
  return ok;
}

std::size_t advection_row(const FaceFluxArgs& a, std::size_t begin, std::size_t count) {
  const double vel_s = a.physics.velocity[a.axis];
  const __m256d vel = _mm256_set1_pd(vel_s);
  const __m256d half = _mm256_set1_pd(0.5 * std::fabs(vel_s));
  const std::size_t end = begin + count;
  std::size_t p = begin;
  for (; p + 4 <= end; p += 4) {
    __m256d ul, ur;
    face_states(a, a.u + p, ul, ur);
    _mm256_storeu_pd(a.flux + p, rusanov_pd(_mm256_mul_pd(vel, ul), _mm256_mul_pd(vel, ur), half, ul, ur));
  }
  if (p < end) face_row_scalar(a, p, end - p);
  return count;
}

std::size_t euler_row(const FaceFluxArgs& a, std::size_t begin, std::size_t count) {
  const int normal = 1 + a.axis;
  const std::size_t end = begin + count;
  std::size_t p = begin;
  for (; p + 4 <= end; p += 4) {
    __m256d ul[5], ur[5], fl[5], fr[5];
    for (int v = 0; v < 5; ++v) face_states(a, a.u + v * a.var_stride + p, ul[v], ur[v]);
    __m256d sl, sr;
    const __m256d ok_l = euler_side_pd(ul, normal, a.physics.gamma, fl, sl);
    const __m256d ok_r = euler_side_pd(ur, normal, a.physics.gamma, fr, sr);
    const int ok = _mm256_movemask_pd(_mm256_and_pd(ok_l, ok_r));
    if (ok != 0xf) return p - begin + static_cast<std::size_t>(__builtin_ctz(~ok & 0xf));
    const __m256d half = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_max_pd(sl, sr));
    for (int v = 0; v < 5; ++v)
      _mm256_storeu_pd(a.flux + v * a.var_stride + p, rusanov_pd(fl[v], fr[v], half, ul[v], ur[v]));
  }
  if (p < end) {
    const std::size_t done = face_row_scalar(a, p, end - p);
    if (done != end - p) return p - begin + done;
  }
  return count;
}

}  // namespace

std::size_t face_row_avx2(const FaceFluxArgs& args, std::size_t begin, std::size_t count) {
  if (args.physics.kind == KernelPhysics::Kind::euler) return euler_row(args, begin, count);
  return advection_row(args, begin, count);
}

}  // namespace halolab::kernels
