#pragma once

// Reference reimplementation of the frame-detection rules. Written as
// exhaustive scans with full sorts; it shares no code with detect.cpp so the
// two can check each other.

#include <cstdint>
#include <optional>
#include <vector>

#include "tmpfc/detect.hpp"
#include "tmpfc/types.hpp"

namespace tmpfc::synth {

struct OracleResult {
  int window = 1;
  std::vector<double> smoothed;
  int f_max = 0;
  std::int64_t a_max = 0;
  int w_first = 0;
  int w_last = 0;
  double near_peak_quantile = 0.0;
  double t_f1 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t_f2 = 0.0;
  std::optional<int> f1;
  std::optional<int> f2;
  int f2_confirm_count = 0;
};

OracleResult oracle_f1_f2(const OpacityCurve& curve, const DetectionParams& params);

}  // namespace tmpfc::synth
