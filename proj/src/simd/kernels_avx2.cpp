// Compiled with -mavx2 when the target is x86-64; only reached through the
// dispatcher after a CPUID check.

#include "tmpfc/simd/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <bit>

namespace tmpfc::simd {
namespace {

void binarize_avx2(const std::uint8_t* src, std::uint8_t* dst, std::size_t n, std::uint8_t cutoff) {
  std::size_t i = 0;
  if (cutoff == 0xFF) {
    for (; i < n; ++i) dst[i] = 0;
    return;
  }
  // x > c  <=>  max(x, c+1) == x  for unsigned bytes
  const __m256i lo = _mm256_set1_epi8(static_cast<char>(cutoff + 1));
  const __m256i one = _mm256_set1_epi8(1);
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i ge = _mm256_cmpeq_epi8(_mm256_max_epu8(x, lo), x);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_and_si256(ge, one));
  }
  for (; i < n; ++i) dst[i] = src[i] > cutoff ? 1 : 0;
}

std::size_t count_nonzero_avx2(const std::uint8_t* p, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    const auto zmask = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(x, zero)));
    c += 32 - static_cast<std::size_t>(std::popcount(zmask));
  }
  for (; i < n; ++i) c += p[i] != 0;
  return c;
}

// Bit i of the result is set iff p[i] != 0, for 32 bytes.
inline std::uint32_t nonzero_mask32(const std::uint8_t* p) {
  const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
  const auto z = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(x, _mm256_setzero_si256())));
  return ~z;
}

std::size_t extract_runs_avx2(const std::uint8_t* row, std::size_t width, Run* out) {
  std::size_t n = 0;
  bool open = false;
  int begin = 0;
  std::size_t base = 0;
  auto consume = [&](std::uint64_t bits, std::size_t nbits) {
    std::size_t pos = 0;
    while (pos < nbits) {
      const std::uint64_t rest = bits >> pos;
      if (!open) {
        if (rest == 0) return;
        pos += static_cast<std::size_t>(std::countr_zero(rest));
        if (pos >= nbits) return;
        open = true;
        begin = static_cast<int>(base + pos);
      } else {
        const std::uint64_t holes = ~rest;
        const auto skip = static_cast<std::size_t>(std::countr_zero(holes));
        if (pos + skip >= nbits) return;
        pos += skip;
        out[n++] = Run{begin, static_cast<int>(base + pos)};
        open = false;
      }
    }
  };
  for (; base + 64 <= width; base += 64) {
    const std::uint64_t bits =
        static_cast<std::uint64_t>(nonzero_mask32(row + base)) |
        (static_cast<std::uint64_t>(nonzero_mask32(row + base + 32)) << 32);
    if (bits == 0 && !open) continue;
    if (bits == ~std::uint64_t{0} && open) continue;
    consume(bits, 64);
  }
  if (base < width) {
    std::uint64_t bits = 0;
    for (std::size_t i = base; i < width; ++i) bits |= static_cast<std::uint64_t>(row[i] != 0) << (i - base);
    consume(bits, width - base);
  }
  if (open) out[n++] = Run{begin, static_cast<int>(width)};
  return n;
}

constexpr KernelTable kAvx2{"avx2", binarize_avx2, count_nonzero_avx2, extract_runs_avx2};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace tmpfc::simd

#else

namespace tmpfc::simd {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace tmpfc::simd

#endif
