#pragma once

// Face-flux row kernels. The scalar kernel is the reference; SIMD variants
// must reproduce it bitwise and are chosen at runtime from the CPU's
// capabilities (override with HALOLAB_KERNEL=scalar|avx2).

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "halolab/physics.hpp"

namespace halolab {

struct FaceFluxArgs {
  const double* u = nullptr;  // block data, ghost-inclusive, variable-major
  double* flux = nullptr;     // same layout as u
  std::size_t var_stride = 0;
  std::ptrdiff_t stride = 1;  // offset between neighbouring cells along `axis`
  int axis = 0;
  int nvar = 1;
  KernelPhysics physics;
  Reconstruction recon = Reconstruction::plm_minmod;
};

// Writes flux[v*var_stride + p] for the face between cells p - stride and p,
// for p in [begin, begin + count) (contiguous along x). Returns count on
// success, otherwise the offset of the first face with a non-physical state
// (fluxes past that offset are unspecified).
using FaceRowKernel = std::size_t (*)(const FaceFluxArgs& args, std::size_t begin, std::size_t count);

enum class KernelIsa { scalar, avx2 };

std::string_view to_string(KernelIsa isa);
std::optional<KernelIsa> parse_kernel_isa(std::string_view name);

bool isa_supported(KernelIsa isa);
std::vector<KernelIsa> supported_isas();

FaceRowKernel face_row_kernel(KernelIsa isa);

// Process-wide selection; initialised from HALOLAB_KERNEL or the best
// supported ISA.
KernelIsa active_isa();
// Throws ConfigError when the ISA is not supported on this CPU/build.
void set_active_isa(KernelIsa isa);

namespace kernels {
std::size_t face_row_scalar(const FaceFluxArgs& args, std::size_t begin, std::size_t count);
#if defined(HALOLAB_HAVE_AVX2_KERNEL)
std::size_t face_row_avx2(const FaceFluxArgs& args, std::size_t begin, std::size_t count);
#endif
}  // namespace kernels

}  // namespace halolab
