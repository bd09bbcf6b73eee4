#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tmpfc/detect.hpp"
#include "tmpfc/types.hpp"

namespace tmpfc {

inline constexpr double kReferenceFps = 30.0;

enum class QcVerdict { Pass, ExcludeLowPeak, ExcludeFrameOrder, ExcludeMissingFrame, ExcludeShortTmpfc };

std::string_view to_string(QcVerdict v);

struct QcStatus {
  QcVerdict verdict = QcVerdict::Pass;
  bool low_confidence = false;  // F2 confirmed on fewer frames than configured
  std::string detail;
};

struct QcThresholds {
  std::int64_t min_peak = 800;
  std::int64_t min_tmpfc = 10;
};

enum class Band { BelowThreshold, Low, Intermediate, High };

std::string_view to_string(Band b);
std::optional<Band> parse_band(std::string_view s);

// Cut points: [low, intermediate) -> LOW, [intermediate, high) -> INTERMEDIATE, >= high -> HIGH.
struct BandBounds {
  double low = 87.0;
  double intermediate = 114.0;
  double high = 124.0;
  friend bool operator==(const BandBounds&, const BandBounds&) = default;
};

struct SeverityBand {
  Band value = Band::BelowThreshold;
  BandBounds bounds_used;
};

struct ClassificationParams {
  double threshold = 87.0;
  BandBounds bands;
};

struct TmpfcResult {
  std::string case_id;
  Territory territory = Territory::LAD;
  double fps_raw = 0.0;
  std::optional<std::int64_t> tmpfc_raw;
  std::optional<double> tmpfc_normalized;
  QcStatus qc;
  std::optional<bool> cmvd_positive;
  std::optional<SeverityBand> band;
};

/// F2 - F1 when both frames exist and F1 < F2.
std::optional<std::int64_t> compute_tmpfc(const FrameDetection& det);

/// Equivalent count at 30 fps; Error(BadFps) unless fps_raw > 0.
double normalize_tmpfc(double raw, double fps_raw);

/// Exclusions in priority order: low peak, missing frame, frame order, short count.
QcStatus apply_qc(const FrameDetection& det, std::optional<std::int64_t> raw, const QcThresholds& qc = {},
                  int f2_confirm_frames = 3);

bool classify_cmvd(double normalized, double threshold = 87.0);

SeverityBand stratify(double normalized, const BandBounds& bounds = {});

TmpfcResult quantify(const OpacityCurve& curve, const FrameDetection& det, const QcThresholds& qc,
                     const ClassificationParams& cls, int f2_confirm_frames = 3);

}  // namespace tmpfc
