#include "tmpfc/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tmpfc/error.hpp"
#include "tmpfc/simd/kernels.hpp"

namespace tmpfc {
namespace {

struct RowRun {
  simd::Run run;
  int row = 0;
};

// Two-pass run-based labeling with union-find; the forest and buffers are
// kept per thread so batch runs don't reallocate for every frame.
class RunLabeler {
 public:
  void label(const BinaryGrid& g) {
    runs_.clear();
    row_start_.assign(static_cast<std::size_t>(g.height()) + 1, 0);
    scratch_.resize(simd::max_runs(static_cast<std::size_t>(g.width())));
    const simd::Kernels k = simd::active();
    for (int y = 0; y < g.height(); ++y) {
      row_start_[static_cast<std::size_t>(y)] = runs_.size();
      const std::size_t n = k.extract_runs(g.row(y), scratch_);
      for (std::size_t i = 0; i < n; ++i) runs_.push_back({scratch_[i], y});
    }
    row_start_[static_cast<std::size_t>(g.height())] = runs_.size();

    parent_.resize(runs_.size());
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    for (int y = 1; y < g.height(); ++y) {
      std::size_t a = row_start_[static_cast<std::size_t>(y) - 1];
      const std::size_t a_end = row_start_[static_cast<std::size_t>(y)];
      std::size_t b = a_end;
      const std::size_t b_end = row_start_[static_cast<std::size_t>(y) + 1];
      // [b1,e1) and [b2,e2) touch under 8-connectivity iff b1 <= e2 && b2 <= e1
      while (a < a_end && b < b_end) {
        const auto& ra = runs_[a].run;
        const auto& rb = runs_[b].run;
        if (ra.begin <= rb.end && rb.begin <= ra.end) unite(a, b);
        if (ra.end < rb.end) ++a;
        else ++b;
      }
    }

    area_.assign(runs_.size(), 0);
    for (std::size_t i = 0; i < runs_.size(); ++i) {
      area_[find(i)] += runs_[i].run.end - runs_[i].run.begin;
    }
  }

  std::int64_t retained(std::int64_t min_area) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < runs_.size(); ++i) {
      if (parent_[i] == i && area_[i] >= min_area) total += area_[i];
    }
    return total;
  }

  void paint_retained(BinaryGrid& out, std::int64_t min_area) {
    for (std::size_t i = 0; i < runs_.size(); ++i) {
      if (area_[find(i)] < min_area) continue;
      auto row = out.row(runs_[i].row);
      std::fill(row.begin() + runs_[i].run.begin, row.begin() + runs_[i].run.end, std::uint8_t{1});
    }
  }

 private:
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
  }

  std::vector<RowRun> runs_;
  std::vector<std::size_t> row_start_;
  std::vector<simd::Run> scratch_;
  std::vector<std::size_t> parent_;
  std::vector<std::int64_t> area_;
};

RunLabeler& thread_labeler() {
  thread_local RunLabeler labeler;
  return labeler;
}

}  // namespace

PreprocessParams PreprocessParams::defaults_for(int width, int height) {
  PreprocessParams p;
  const int short_side = std::min(width, height);
  p.border_band_px = std::max(4, static_cast<int>(std::lround(0.02 * short_side)));
  p.min_component_area_px =
      std::max<std::int64_t>(16, std::llround(0.001 * static_cast<double>(width) * static_cast<double>(height)));
  return p;
}

void PreprocessParams::validate(int width, int height) const {
  if (border_band_px < 0) throw Error(ErrorCode::InvalidParams, "border band must be non-negative");
  if (min_component_area_px < 1) throw Error(ErrorCode::InvalidParams, "min component area must be >= 1");
  if (2 * border_band_px >= std::min(width, height)) {
    throw Error(ErrorCode::BandTooWide, "border band " + std::to_string(border_band_px) + " px leaves no interior in a " +
                                            std::to_string(width) + "x" + std::to_string(height) + " frame");
  }
}

PreprocessParams PreprocessOverrides::resolve(int width, int height) const {
  PreprocessParams p = PreprocessParams::defaults_for(width, height);
  if (border_band_px) p.border_band_px = *border_band_px;
  if (min_component_area_px) p.min_component_area_px = *min_component_area_px;
  return p;
}

void strip_border_in_place(BinaryGrid& frame, int band) {
  const int w = frame.width();
  const int h = frame.height();
  if (band < 0) throw Error(ErrorCode::InvalidParams, "border band must be non-negative");
  if (2 * band >= std::min(w, h)) {
    throw Error(ErrorCode::BandTooWide, "border band " + std::to_string(band) + " too wide for " + std::to_string(w) +
                                            "x" + std::to_string(h));
  }
  if (band == 0) return;
  for (int y = 0; y < h; ++y) {
    auto row = frame.row(y);
    if (y < band || y >= h - band) {
      std::fill(row.begin(), row.end(), std::uint8_t{0});
    } else {
      std::fill(row.begin(), row.begin() + band, std::uint8_t{0});
      std::fill(row.end() - band, row.end(), std::uint8_t{0});
    }
  }
}

BinaryGrid strip_border(const BinaryGrid& frame, int band) {
  BinaryGrid out = frame;
  strip_border_in_place(out, band);
  return out;
}

BinaryGrid remove_small_components(const BinaryGrid& frame, std::int64_t min_area) {
  if (min_area <= 1) return frame;
  auto& labeler = thread_labeler();
  labeler.label(frame);
  BinaryGrid out(frame.width(), frame.height());
  labeler.paint_retained(out, min_area);
  return out;
}

std::int64_t count_retained_pixels(const BinaryGrid& frame, std::int64_t min_area) {
  if (min_area <= 1) return static_cast<std::int64_t>(frame.count());
  auto& labeler = thread_labeler();
  labeler.label(frame);
  return labeler.retained(min_area);
}

std::int64_t cleaned_count(const BinaryGrid& frame, const PreprocessParams& params) {
  params.validate(frame.width(), frame.height());
  BinaryGrid work = frame;
  strip_border_in_place(work, params.border_band_px);
  return count_retained_pixels(work, params.min_component_area_px);
}

OpacityCurve extract_opacity_curve(const MaskSequence& seq, const PreprocessParams& params) {
  params.validate(seq.manifest.width, seq.manifest.height);
  OpacityCurve curve;
  curve.case_id = seq.manifest.case_id;
  curve.territory = seq.manifest.territory;
  curve.fps_raw = seq.manifest.fps_raw;
  curve.a.reserve(seq.frames.size());
  BinaryGrid work;
  for (const auto& frame : seq.frames) {
    work = frame;
    strip_border_in_place(work, params.border_band_px);
    curve.a.push_back(count_retained_pixels(work, params.min_component_area_px));
  }
  return curve;
}

}  // namespace tmpfc
