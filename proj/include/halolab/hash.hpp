#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace halolab {

// 64-bit FNV-1a.
class Fnv1a {
 public:
  void update(const void* data, std::size_t bytes);
  void update(std::span<const double> values) { update(values.data(), values.size_bytes()); }
  void update(std::string_view s) { update(s.data(), s.size()); }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t hash_values(std::span<const double> values);
std::string hex64(std::uint64_t v);

}  // namespace halolab
