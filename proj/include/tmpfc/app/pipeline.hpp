#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmpfc/app/config.hpp"
#include "tmpfc/detect.hpp"
#include "tmpfc/ingest.hpp"
#include "tmpfc/quantify.hpp"

namespace tmpfc::app {

struct CaseOutcome {
  Manifest manifest;
  PreprocessParams preprocess;
  OpacityCurve curve;
  FrameDetection detection;
  TmpfcResult result;
};

/// Streams frames from disk (read, clean, count) without holding the stack.
OpacityCurve curve_from_manifest(const Manifest& manifest, const PreprocessParams& params);

CaseOutcome run_case(const Manifest& manifest, const RunConfig& config);
CaseOutcome run_case(const MaskSequence& seq, const RunConfig& config);
CaseOutcome run_curve(const Manifest& manifest, OpacityCurve curve, const PreprocessParams& pre, const RunConfig& config);

}  // namespace tmpfc::app
