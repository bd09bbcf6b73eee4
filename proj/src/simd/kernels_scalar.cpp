#include "tmpfc/simd/kernels.hpp"

namespace tmpfc::simd {
namespace {

void binarize_scalar(const std::uint8_t* src, std::uint8_t* dst, std::size_t n, std::uint8_t cutoff) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > cutoff ? 1 : 0;
}

std::size_t count_nonzero_scalar(const std::uint8_t* p, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += p[i] != 0;
  return c;
}

std::size_t extract_runs_scalar(const std::uint8_t* row, std::size_t width, Run* out) {
  std::size_t n = 0;
  std::size_t x = 0;
  while (x < width) {
    while (x < width && row[x] == 0) ++x;
    if (x == width) break;
    const std::size_t begin = x;
    while (x < width && row[x] != 0) ++x;
    out[n++] = Run{static_cast<int>(begin), static_cast<int>(x)};
  }
  return n;
}

constexpr KernelTable kScalar{"scalar", binarize_scalar, count_nonzero_scalar, extract_runs_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace tmpfc::simd
