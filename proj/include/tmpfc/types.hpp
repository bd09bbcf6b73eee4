#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tmpfc {

enum class Territory { LAD, LCX, RCA };

inline constexpr std::array<Territory, 3> kAllTerritories = {Territory::LAD, Territory::LCX,
                                                             Territory::RCA};

std::string_view to_string(Territory t);
/// Throws Error(UnknownTerritory) for anything other than "LAD", "LCX", "RCA".
Territory parse_territory(std::string_view s);

enum class GroupLabel { A_obstructive, B_cmvd, C_control };

std::string_view to_string(GroupLabel g);
std::optional<GroupLabel> parse_group_label(std::string_view s);

// Row-major binary raster; one byte per pixel holding 0 or 1 so the SIMD
// kernels can stream it directly.
class BinaryGrid {
 public:
  BinaryGrid() = default;
  BinaryGrid(int width, int height) : width_(width), height_(height), px_(checked_size(width, height), 0) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return px_.size(); }

  bool at(int x, int y) const { return px_[index(x, y)] != 0; }
  void set(int x, int y, bool v) { px_[index(x, y)] = v ? 1 : 0; }

  std::span<std::uint8_t> row(int y) { return {px_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const std::uint8_t> row(int y) const {
    return {px_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }
  std::span<std::uint8_t> pixels() noexcept { return px_; }
  std::span<const std::uint8_t> pixels() const noexcept { return px_; }

  std::size_t count() const;

  friend bool operator==(const BinaryGrid&, const BinaryGrid&) = default;

 private:
  static std::size_t checked_size(int w, int h);
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> px_;
};

struct OpacityCurve {
  std::string case_id;
  Territory territory = Territory::LAD;
  double fps_raw = 30.0;
  std::vector<std::int64_t> a;  // vessel pixels per frame
};

}  // namespace tmpfc
