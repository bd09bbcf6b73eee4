#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "tmpfc/types.hpp"

namespace tmpfc {

inline constexpr std::uint8_t kVesselCutoff = 127;  // value > cutoff is vessel

struct PgmHeader {
  bool binary = true;  // P5 vs P2
  int width = 0;
  int height = 0;
  int maxval = 255;
};

/// Decodes a P5 or P2 image and thresholds it (value > cutoff -> true).
/// Throws Error(FormatError) on a bad magic, malformed header, maxval > 255,
/// truncated raster or out-of-range sample. `source` only labels messages.
BinaryGrid decode_pgm_mask(std::span<const char> bytes, const std::string& source,
                           std::uint8_t cutoff = kVesselCutoff);

/// Reads a mask frame from disk; Error(IoError) when the file can't be read.
BinaryGrid read_pgm_mask(const std::filesystem::path& path, std::uint8_t cutoff = kVesselCutoff);

PgmHeader read_pgm_header(const std::filesystem::path& path);

/// P5 encoding with vessel = 255, background = 0.
std::string encode_pgm(const BinaryGrid& grid);
void write_pgm(const std::filesystem::path& path, const BinaryGrid& grid);

}  // namespace tmpfc
