#pragma once

// Pixel-level inner loops with a portable scalar reference and an AVX2
// variant. The variant is picked once at first use from the CPU's
// capabilities; TMPFC_SIMD=scalar in the environment forces the reference.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace tmpfc::simd {

// Half-open run of nonzero bytes [begin, end) within one raster row.
struct Run {
  int begin = 0;
  int end = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

// A row of width w holds at most (w + 1) / 2 runs.
inline constexpr std::size_t max_runs(std::size_t width) { return (width + 1) / 2; }

struct KernelTable {
  const char* name;
  // dst[i] = src[i] > cutoff ? 1 : 0
  void (*binarize)(const std::uint8_t* src, std::uint8_t* dst, std::size_t n, std::uint8_t cutoff);
  std::size_t (*count_nonzero)(const std::uint8_t* p, std::size_t n);
  // Writes the maximal runs of nonzero bytes, left to right; returns how many.
  std::size_t (*extract_runs)(const std::uint8_t* row, std::size_t width, Run* out);
};

class Kernels {
 public:
  explicit constexpr Kernels(const KernelTable& table) : t_(&table) {}

  std::string_view name() const { return t_->name; }

  void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst, std::uint8_t cutoff) const;
  std::size_t count_nonzero(std::span<const std::uint8_t> p) const { return t_->count_nonzero(p.data(), p.size()); }
  std::size_t extract_runs(std::span<const std::uint8_t> row, std::span<Run> out) const;

 private:
  const KernelTable* t_;
};

const KernelTable& scalar_table();
// nullptr when the AVX2 translation unit was not built for this target.
const KernelTable* avx2_table();

bool cpu_supports_avx2();

Kernels scalar();
bool has_avx2();
Kernels avx2();  // throws unless has_avx2()

// Dispatched implementation used by the library.
Kernels active();

}  // namespace tmpfc::simd
