#pragma once

#include <cstdint>
#include <optional>

#include "tmpfc/ingest.hpp"
#include "tmpfc/types.hpp"

namespace tmpfc {

struct PreprocessParams {
  int border_band_px = 4;
  std::int64_t min_component_area_px = 16;

  /// Resolution-relative defaults: band = max(4, round(2% of the short side)),
  /// area = max(16, round(0.1% of the frame area)).
  static PreprocessParams defaults_for(int width, int height);

  /// Throws Error(BandTooWide) unless 2*band < min(width, height), and
  /// Error(InvalidParams) for a negative band or non-positive area.
  void validate(int width, int height) const;
};

// CLI/config overrides applied on top of the per-resolution defaults.
struct PreprocessOverrides {
  std::optional<int> border_band_px;
  std::optional<std::int64_t> min_component_area_px;

  PreprocessParams resolve(int width, int height) const;
};

BinaryGrid strip_border(const BinaryGrid& frame, int band);
void strip_border_in_place(BinaryGrid& frame, int band);

/// Erases every 8-connected component with fewer than `min_area` pixels.
BinaryGrid remove_small_components(const BinaryGrid& frame, std::int64_t min_area);

/// Pixels that survive remove_small_components, without materialising the grid.
std::int64_t count_retained_pixels(const BinaryGrid& frame, std::int64_t min_area);

/// A_t for one frame: strip_border then remove_small_components, counted.
std::int64_t cleaned_count(const BinaryGrid& frame, const PreprocessParams& params);

OpacityCurve extract_opacity_curve(const MaskSequence& seq, const PreprocessParams& params);

}  // namespace tmpfc
