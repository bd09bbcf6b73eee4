#include "tmpfc/detect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tmpfc/error.hpp"

namespace tmpfc {

void DetectionParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParams, msg); };
  if (n1 < 1) fail("n1 must be >= 1");
  if (n2 < 1) fail("n2 must be >= 1");
  if (!(q_fill > 0.0 && q_fill < 1.0)) fail("q_fill must lie in (0,1)");
  if (!(delta2 > 0.0 && delta2 < delta1 && delta1 <= 1.0)) fail("require 0 < delta2 < delta1 <= 1");
  if (!(median_frac >= 0.0)) fail("median_frac must be >= 0");
  if (median_min < 1 || median_min % 2 == 0 || median_max % 2 == 0 || median_min > median_max) {
    fail("median_min/median_max must be odd with median_min <= median_max");
  }
  if (f1_confirm_frames < 1 || f2_confirm_frames < 1) fail("confirmation frame counts must be >= 1");
}

int median_window_size(int length, const DetectionParams& params) {
  long w = std::lround(params.median_frac * static_cast<double>(length));
  if (w % 2 == 0) ++w;
  return static_cast<int>(std::clamp<long>(w, params.median_min, params.median_max));
}

SmoothedCurve median_filter(const OpacityCurve& curve, int window) {
  if (window < 1 || window % 2 == 0) throw Error(ErrorCode::InvalidParams, "median window must be odd and positive");
  SmoothedCurve sc;
  sc.raw = curve;
  sc.window = window;
  const int n = static_cast<int>(curve.a.size());
  const int half = window / 2;
  sc.smoothed.resize(curve.a.size());
  std::vector<std::int64_t> buf(static_cast<std::size_t>(window));
  for (int t = 0; t < n; ++t) {
    for (int k = -half; k <= half; ++k) {
      buf[static_cast<std::size_t>(k + half)] = curve.a[static_cast<std::size_t>(std::clamp(t + k, 0, n - 1))];
    }
    auto mid = buf.begin() + half;
    std::nth_element(buf.begin(), mid, buf.end());
    sc.smoothed[static_cast<std::size_t>(t)] = static_cast<double>(*mid);
  }
  return sc;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "quantile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

Peak find_peak(const OpacityCurve& curve) {
  if (curve.a.empty()) throw Error(ErrorCode::EmptyInput, "peak of an empty curve");
  const auto it = std::max_element(curve.a.begin(), curve.a.end());  // first maximum
  return {static_cast<int>(it - curve.a.begin()), *it};
}

FillThreshold compute_t_f1(const SmoothedCurve& sc, int f_max, std::int64_t a_max, const DetectionParams& params) {
  const int n = static_cast<int>(sc.smoothed.size());
  FillThreshold out;
  out.w_max.first = std::max(0, f_max - params.n1 / 2);
  out.w_max.last = std::min(n - 1, f_max + (params.n1 + 1) / 2 - 1);
  const std::span<const double> window(sc.smoothed.data() + out.w_max.first,
                                       static_cast<std::size_t>(out.w_max.last - out.w_max.first + 1));
  out.near_peak_quantile = quantile(window, params.q_fill);
  out.t_f1 = std::max(out.near_peak_quantile, params.delta1 * static_cast<double>(a_max));
  return out;
}

F1Result detect_f1(const SmoothedCurve& sc, double t_f1, int f_max, const DetectionParams& params) {
  const auto& s = sc.smoothed;
  auto at = [&](int i) { return s[static_cast<std::size_t>(i)]; };
  if (at(f_max) < t_f1) return {};

  int start = f_max;
  while (start > 0 && at(start - 1) >= t_f1) --start;

  for (int cand = start; cand <= f_max; ++cand) {
    bool rising = true;
    for (int k = 1; k <= params.f1_confirm_frames && rising; ++k) {
      const int cur = std::min(cand + k, f_max);
      const int prev = std::min(cand + k - 1, f_max);
      rising = at(cur) >= at(prev);
    }
    if (rising) return {cand, true};
  }
  return {};
}

ClearanceThreshold compute_t_f2(const SmoothedCurve& sc, std::int64_t a_max, const DetectionParams& params) {
  const auto& s = sc.smoothed;
  const auto w = std::min<std::size_t>(static_cast<std::size_t>(params.n2), s.size());
  ClearanceThreshold out;
  out.t1 = quantile(std::span<const double>(s.data(), w), params.q_fill);
  out.t2 = quantile(std::span<const double>(s.data() + (s.size() - w), w), params.q_fill);
  out.t_f2 = std::min({out.t1, out.t2, params.delta2 * static_cast<double>(a_max)});
  return out;
}

F2Result detect_f2(const SmoothedCurve& sc, double t_f2, int f_max, const DetectionParams& params) {
  const auto& s = sc.smoothed;
  const int n = static_cast<int>(s.size());
  int t = f_max + 1;
  while (t < n) {
    if (s[static_cast<std::size_t>(t)] > t_f2) {
      ++t;
      continue;
    }
    const int checkable = std::min(params.f2_confirm_frames, n - 1 - t);
    int rebound = -1;
    for (int k = 1; k <= checkable; ++k) {
      if (s[static_cast<std::size_t>(t + k)] > t_f2) {
        rebound = t + k;
        break;
      }
    }
    if (rebound < 0) return {t, checkable};
    t = rebound + 1;
  }
  return {};
}

FrameDetection detect_frames(const OpacityCurve& curve, const DetectionParams& params) {
  if (curve.a.empty()) throw Error(ErrorCode::EmptyInput, "cannot detect frames on an empty curve");
  FrameDetection det;
  det.length = static_cast<int>(curve.a.size());
  det.median_window = median_window_size(det.length, params);
  SmoothedCurve sc = median_filter(curve, det.median_window);

  const Peak peak = find_peak(curve);
  det.f_max = peak.f_max;
  det.a_max = peak.a_max;

  const FillThreshold fill = compute_t_f1(sc, det.f_max, det.a_max, params);
  det.w_max = fill.w_max;
  det.near_peak_quantile = fill.near_peak_quantile;
  det.t_f1 = fill.t_f1;
  const F1Result f1 = detect_f1(sc, det.t_f1, det.f_max, params);
  det.f1 = f1.f1;
  det.f1_confirmed = f1.confirmed;

  const ClearanceThreshold clear = compute_t_f2(sc, det.a_max, params);
  det.t1 = clear.t1;
  det.t2 = clear.t2;
  det.t_f2 = clear.t_f2;
  const F2Result f2 = detect_f2(sc, det.t_f2, det.f_max, params);
  det.f2 = f2.f2;
  det.f2_confirm_count = f2.confirm_count;

  det.smoothed = std::move(sc.smoothed);
  return det;
}

FrameDetection detect_frames(const OpacityCurve& curve, const TerritoryProfile& profile) {
  return detect_frames(curve, profile[curve.territory]);
}

}  // namespace tmpfc
