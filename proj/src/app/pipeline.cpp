#include "tmpfc/app/pipeline.hpp"

#include <sstream>

#include "tmpfc/error.hpp"
#include "tmpfc/pgm.hpp"
#include "tmpfc/preprocess.hpp"

namespace tmpfc::app {

OpacityCurve curve_from_manifest(const Manifest& manifest, const PreprocessParams& params) {
  params.validate(manifest.width, manifest.height);
  OpacityCurve curve;
  curve.case_id = manifest.case_id;
  curve.territory = manifest.territory;
  curve.fps_raw = manifest.fps_raw;
  curve.a.reserve(manifest.frame_paths.size());
  for (const auto& path : manifest.frame_paths) {
    BinaryGrid frame = read_pgm_mask(path);
    if (frame.width() != manifest.width || frame.height() != manifest.height) {
      std::ostringstream msg;
      msg << path.string() << " is " << frame.width() << "x" << frame.height() << ", manifest declares "
          << manifest.width << "x" << manifest.height;
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    strip_border_in_place(frame, params.border_band_px);
    curve.a.push_back(count_retained_pixels(frame, params.min_component_area_px));
  }
  return curve;
}

CaseOutcome run_curve(const Manifest& manifest, OpacityCurve curve, const PreprocessParams& pre, const RunConfig& config) {
  CaseOutcome out;
  out.manifest = manifest;
  out.preprocess = pre;
  out.curve = std::move(curve);
  const DetectionParams& dp = config.profile[out.curve.territory];
  out.detection = detect_frames(out.curve, dp);
  out.result = quantify(out.curve, out.detection, config.qc, config.classification, dp.f2_confirm_frames);
  return out;
}

CaseOutcome run_case(const Manifest& manifest, const RunConfig& config) {
  const PreprocessParams pre = config.preprocess.resolve(manifest.width, manifest.height);
  return run_curve(manifest, curve_from_manifest(manifest, pre), pre, config);
}

CaseOutcome run_case(const MaskSequence& seq, const RunConfig& config) {
  const PreprocessParams pre = config.preprocess.resolve(seq.manifest.width, seq.manifest.height);
  return run_curve(seq.manifest, extract_opacity_curve(seq, pre), pre, config);
}

}  // namespace tmpfc::app
