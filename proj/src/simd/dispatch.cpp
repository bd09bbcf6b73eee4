#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "tmpfc/simd/kernels.hpp"

namespace tmpfc::simd {

void Kernels::binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst, std::uint8_t cutoff) const {
  if (dst.size() < src.size()) throw std::length_error("binarize: destination shorter than source");
  t_->binarize(src.data(), dst.data(), src.size(), cutoff);
}

std::size_t Kernels::extract_runs(std::span<const std::uint8_t> row, std::span<Run> out) const {
  if (out.size() < max_runs(row.size())) throw std::length_error("extract_runs: run buffer too small");
  return t_->extract_runs(row.data(), row.size(), out.data());
}

bool cpu_supports_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Kernels scalar() { return Kernels(scalar_table()); }

bool has_avx2() { return avx2_table() != nullptr && cpu_supports_avx2(); }

Kernels avx2() {
  if (!has_avx2()) throw std::runtime_error("AVX2 kernels unavailable on this CPU/build");
  return Kernels(*avx2_table());
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("TMPFC_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return scalar_table();
  }
  return has_avx2() ? *avx2_table() : scalar_table();
}

}  // namespace

Kernels active() {
  static const KernelTable& chosen = select();
  return Kernels(chosen);
}

}  // namespace tmpfc::simd
