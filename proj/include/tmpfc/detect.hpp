#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tmpfc/types.hpp"

namespace tmpfc {

struct DetectionParams {
  int n1 = 12;            // near-peak window width (frames)
  double q_fill = 0.3;    // quantile used for both window kinds
  int n2 = 5;             // head/tail boundary window width (frames)
  double delta1 = 0.9;    // floor of T_F1 as a fraction of the peak count
  double delta2 = 0.1;    // cap of T_F2 as a fraction of the peak count
  double median_frac = 0.04;
  int median_min = 3;
  int median_max = 11;
  int f1_confirm_frames = 2;
  int f2_confirm_frames = 3;

  /// Throws Error(InvalidParams) when any field violates its range.
  void validate() const;

  friend bool operator==(const DetectionParams&, const DetectionParams&) = default;
};

class TerritoryProfile {
 public:
  TerritoryProfile() = default;
  explicit TerritoryProfile(const DetectionParams& all) { params_.fill(all); }

  const DetectionParams& operator[](Territory t) const { return params_[static_cast<std::size_t>(t)]; }
  DetectionParams& operator[](Territory t) { return params_[static_cast<std::size_t>(t)]; }

 private:
  std::array<DetectionParams, 3> params_{};
};

struct SmoothedCurve {
  OpacityCurve raw;
  int window = 1;
  std::vector<double> smoothed;
};

// Inclusive frame-index interval.
struct FrameInterval {
  int first = 0;
  int last = 0;
  friend bool operator==(const FrameInterval&, const FrameInterval&) = default;
};

struct Peak {
  int f_max = 0;
  std::int64_t a_max = 0;
};

struct FillThreshold {
  double t_f1 = 0.0;
  double near_peak_quantile = 0.0;
  FrameInterval w_max;
};

struct ClearanceThreshold {
  double t1 = 0.0;
  double t2 = 0.0;
  double t_f2 = 0.0;
};

struct F1Result {
  std::optional<int> f1;
  bool confirmed = false;
};

struct F2Result {
  std::optional<int> f2;
  int confirm_count = 0;  // subsequent frames that could actually be checked
};

struct FrameDetection {
  int length = 0;
  int median_window = 1;
  int f_max = 0;
  std::int64_t a_max = 0;
  FrameInterval w_max;
  double near_peak_quantile = 0.0;
  double t_f1 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t_f2 = 0.0;
  std::optional<int> f1;
  std::optional<int> f2;
  bool f1_confirmed = false;
  int f2_confirm_count = 0;
  std::vector<double> smoothed;
};

int median_window_size(int length, const DetectionParams& params);

/// Sliding median with edge replication; window must be odd.
SmoothedCurve median_filter(const OpacityCurve& curve, int window);

/// Linear interpolation between order statistics (h = (n-1)q).
/// Throws Error(EmptyInput) on an empty span.
double quantile(std::span<const double> values, double q);

/// Earliest frame attaining the maximum of the raw curve.
Peak find_peak(const OpacityCurve& curve);

FillThreshold compute_t_f1(const SmoothedCurve& sc, int f_max, std::int64_t a_max, const DetectionParams& params);
F1Result detect_f1(const SmoothedCurve& sc, double t_f1, int f_max, const DetectionParams& params);

ClearanceThreshold compute_t_f2(const SmoothedCurve& sc, std::int64_t a_max, const DetectionParams& params);
F2Result detect_f2(const SmoothedCurve& sc, double t_f2, int f_max, const DetectionParams& params);

FrameDetection detect_frames(const OpacityCurve& curve, const DetectionParams& params);
FrameDetection detect_frames(const OpacityCurve& curve, const TerritoryProfile& profile);

}  // namespace tmpfc
