#include <atomic>
#include <cstdlib>
#include <string>

#include "halolab/error.hpp"
#include "halolab/kernels.hpp"

namespace halolab {

namespace {

KernelIsa best_supported() {
  return isa_supported(KernelIsa::avx2) ? KernelIsa::avx2 : KernelIsa::scalar;
}

KernelIsa initial_isa() {
  if (const char* env = std::getenv("HALOLAB_KERNEL")) {
    const std::string name(env);
    if (name.empty() || name == "auto") return best_supported();
    const auto isa = parse_kernel_isa(name);
    if (isa && isa_supported(*isa)) return *isa;
    // An unusable override falls back to the reference kernel.
    return KernelIsa::scalar;
  }
  return best_supported();
}

std::atomic<KernelIsa>& active_slot() {
  static std::atomic<KernelIsa> slot{initial_isa()};
  return slot;
}

}  // namespace

std::string_view to_string(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::scalar: return "scalar";
    case KernelIsa::avx2: return "avx2";
  }
  return "?";
}

std::optional<KernelIsa> parse_kernel_isa(std::string_view name) {
  if (name == "scalar") return KernelIsa::scalar;
  if (name == "avx2") return KernelIsa::avx2;
  return std::nullopt;
}

bool isa_supported(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::scalar: return true;
    case KernelIsa::avx2:
#if defined(HALOLAB_HAVE_AVX2_KERNEL)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::vector<KernelIsa> supported_isas() {
  std::vector<KernelIsa> out;
  for (auto isa : {KernelIsa::scalar, KernelIsa::avx2})
    if (isa_supported(isa)) out.push_back(isa);
  return out;
}

FaceRowKernel face_row_kernel(KernelIsa isa) {
  if (!isa_supported(isa)) throw ConfigError("kernel '" + std::string(to_string(isa)) + "' not supported here");
#if defined(HALOLAB_HAVE_AVX2_KERNEL)
  if (isa == KernelIsa::avx2) return &kernels::face_row_avx2;
#endif
  return &kernels::face_row_scalar;
}

KernelIsa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(KernelIsa isa) {
  if (!isa_supported(isa)) throw ConfigError("kernel '" + std::string(to_string(isa)) + "' not supported here");
  active_slot().store(isa, std::memory_order_relaxed);
}

}  // namespace halolab
