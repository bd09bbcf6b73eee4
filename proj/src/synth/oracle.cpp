#include "tmpfc/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "tmpfc/error.hpp"

namespace tmpfc::synth {
namespace {

double sorted_interp(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * q;
  const double fl = std::floor(h);
  const auto i = static_cast<std::size_t>(fl);
  if (i + 1 >= v.size()) return v[v.size() - 1];
  return v[i] + (h - fl) * (v[i + 1] - v[i]);
}

}  // namespace

OracleResult oracle_f1_f2(const OpacityCurve& curve, const DetectionParams& p) {
  const int n = static_cast<int>(curve.a.size());
  if (n == 0) throw Error(ErrorCode::EmptyInput, "oracle on an empty curve");
  OracleResult r;

  long w = std::lround(p.median_frac * n);
  if (w % 2 == 0) w += 1;
  if (w < p.median_min) w = p.median_min;
  if (w > p.median_max) w = p.median_max;
  r.window = static_cast<int>(w);

  for (int t = 0; t < n; ++t) {
    std::vector<double> vals;
    for (int i = t - r.window / 2; i <= t + r.window / 2; ++i) {
      const int j = i < 0 ? 0 : (i >= n ? n - 1 : i);
      vals.push_back(static_cast<double>(curve.a[static_cast<std::size_t>(j)]));
    }
    std::sort(vals.begin(), vals.end());
    r.smoothed.push_back(vals[vals.size() / 2]);
  }
  const auto& s = r.smoothed;

  r.f_max = 0;
  r.a_max = curve.a[0];
  for (int t = 1; t < n; ++t) {
    if (curve.a[static_cast<std::size_t>(t)] > r.a_max) {
      r.a_max = curve.a[static_cast<std::size_t>(t)];
      r.f_max = t;
    }
  }

  const int lo = r.f_max - p.n1 / 2;
  const int hi = r.f_max + (p.n1 - p.n1 / 2) - 1;
  std::vector<double> near;
  r.w_first = n;
  r.w_last = -1;
  for (int t = 0; t < n; ++t) {
    if (t >= lo && t <= hi) {
      near.push_back(s[static_cast<std::size_t>(t)]);
      r.w_first = std::min(r.w_first, t);
      r.w_last = std::max(r.w_last, t);
    }
  }
  r.near_peak_quantile = sorted_interp(near, p.q_fill);
  r.t_f1 = std::max(r.near_peak_quantile, p.delta1 * static_cast<double>(r.a_max));

  // F1: smallest c such that every frame c..f_max clears t_f1 and the
  // (f_max-clipped) slope confirmation holds.
  for (int c = 0; c <= r.f_max && !r.f1; ++c) {
    bool in_run = true;
    for (int t = c; t <= r.f_max; ++t) in_run = in_run && s[static_cast<std::size_t>(t)] >= r.t_f1;
    if (!in_run) continue;
    bool ok = true;
    for (int k = 1; k <= p.f1_confirm_frames; ++k) {
      const int a = std::min(c + k, r.f_max);
      const int b = std::min(c + k - 1, r.f_max);
      if (s[static_cast<std::size_t>(a)] < s[static_cast<std::size_t>(b)]) ok = false;
    }
    if (ok) r.f1 = c;
  }

  const int head = std::min(p.n2, n);
  r.t1 = sorted_interp(std::vector<double>(s.begin(), s.begin() + head), p.q_fill);
  r.t2 = sorted_interp(std::vector<double>(s.end() - head, s.end()), p.q_fill);
  r.t_f2 = std::min(std::min(r.t1, r.t2), p.delta2 * static_cast<double>(r.a_max));

  // F2: smallest t after the peak at or below t_f2 whose checkable successors
  // all stay at or below it.
  for (int t = r.f_max + 1; t < n && !r.f2; ++t) {
    if (s[static_cast<std::size_t>(t)] > r.t_f2) continue;
    const int checks = std::min(p.f2_confirm_frames, n - 1 - t);
    bool ok = true;
    for (int k = 1; k <= checks; ++k) {
      if (s[static_cast<std::size_t>(t + k)] > r.t_f2) ok = false;
    }
    if (ok) {
      r.f2 = t;
      r.f2_confirm_count = checks;
    }
  }
  return r;
}

}  // namespace tmpfc::synth
