#pragma once

#include <filesystem>
#include <string>

#include "tmpfc/detect.hpp"
#include "tmpfc/preprocess.hpp"
#include "tmpfc/quantify.hpp"

namespace tmpfc::app {

struct RunConfig {
  TerritoryProfile profile{DetectionParams{}};
  PreprocessOverrides preprocess;
  QcThresholds qc;
  ClassificationParams classification;
  std::filesystem::path output_dir = ".";
  int jobs = 1;

  void validate() const;
};

/// Key/value document with [sections]:
///
///   [preprocess]   border_band, min_component_area
///   [detect]       n1, q_fill, n2, delta1, delta2, median_frac, median_min,
///                  median_max, f1_confirm_frames, f2_confirm_frames
///   [detect.LAD]   same keys, one territory only (also LCX, RCA)
///   [qc]           min_peak, min_tmpfc
///   [classify]     threshold, bands = [87, 114, 124]
///   [run]          jobs, output_dir
///
/// '#' starts a comment. Unknown sections or keys are errors.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace tmpfc::app
