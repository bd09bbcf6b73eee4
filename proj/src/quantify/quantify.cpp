#include "tmpfc/quantify.hpp"

#include "tmpfc/error.hpp"

namespace tmpfc {

std::string_view to_string(QcVerdict v) {
  switch (v) {
    case QcVerdict::Pass: return "PASS";
    case QcVerdict::ExcludeLowPeak: return "EXCLUDE_LOW_PEAK";
    case QcVerdict::ExcludeFrameOrder: return "EXCLUDE_FRAME_ORDER";
    case QcVerdict::ExcludeMissingFrame: return "EXCLUDE_MISSING_FRAME";
    case QcVerdict::ExcludeShortTmpfc: return "EXCLUDE_SHORT_TMPFC";
  }
  return "?";
}

std::string_view to_string(Band b) {
  switch (b) {
    case Band::BelowThreshold: return "BELOW_THRESHOLD";
    case Band::Low: return "LOW";
    case Band::Intermediate: return "INTERMEDIATE";
    case Band::High: return "HIGH";
  }
  return "?";
}

std::optional<Band> parse_band(std::string_view s) {
  if (s == "BELOW_THRESHOLD") return Band::BelowThreshold;
  if (s == "LOW") return Band::Low;
  if (s == "INTERMEDIATE") return Band::Intermediate;
  if (s == "HIGH") return Band::High;
  return std::nullopt;
}

std::optional<std::int64_t> compute_tmpfc(const FrameDetection& det) {
  if (!det.f1 || !det.f2 || *det.f1 >= *det.f2) return std::nullopt;
  return static_cast<std::int64_t>(*det.f2 - *det.f1);
}

double normalize_tmpfc(double raw, double fps_raw) {
  if (!(fps_raw > 0.0)) throw Error(ErrorCode::BadFps, "fps_raw must be > 0");
  return raw * kReferenceFps / fps_raw;  // exact identity at 30 fps for integral counts
}

QcStatus apply_qc(const FrameDetection& det, std::optional<std::int64_t> raw, const QcThresholds& qc,
                  int f2_confirm_frames) {
  QcStatus st;
  st.low_confidence = det.f2.has_value() && det.f2_confirm_count < f2_confirm_frames;
  if (det.a_max < qc.min_peak) {
    st.verdict = QcVerdict::ExcludeLowPeak;
    st.detail = "A_max " + std::to_string(det.a_max) + " < " + std::to_string(qc.min_peak);
  } else if (!det.f1 || !det.f2) {
    st.verdict = QcVerdict::ExcludeMissingFrame;
    st.detail = !det.f1 && !det.f2 ? "F1 and F2 not detected" : (!det.f1 ? "F1 not detected" : "F2 not detected");
  } else if (*det.f1 >= *det.f2) {
    st.verdict = QcVerdict::ExcludeFrameOrder;
    st.detail = "F1 " + std::to_string(*det.f1) + " >= F2 " + std::to_string(*det.f2);
  } else if (!raw || *raw < qc.min_tmpfc) {
    st.verdict = QcVerdict::ExcludeShortTmpfc;
    st.detail = "TMPFC " + (raw ? std::to_string(*raw) : std::string("n/a")) + " < " + std::to_string(qc.min_tmpfc);
  } else {
    st.verdict = QcVerdict::Pass;
    st.detail = st.low_confidence ? "F2 confirmed on " + std::to_string(det.f2_confirm_count) + " frame(s)" : "";
  }
  return st;
}

bool classify_cmvd(double normalized, double threshold) { return normalized >= threshold; }

SeverityBand stratify(double normalized, const BandBounds& bounds) {
  SeverityBand b;
  b.bounds_used = bounds;
  if (normalized < bounds.low) b.value = Band::BelowThreshold;
  else if (normalized < bounds.intermediate) b.value = Band::Low;
  else if (normalized < bounds.high) b.value = Band::Intermediate;
  else b.value = Band::High;
  return b;
}

TmpfcResult quantify(const OpacityCurve& curve, const FrameDetection& det, const QcThresholds& qc,
                     const ClassificationParams& cls, int f2_confirm_frames) {
  TmpfcResult r;
  r.case_id = curve.case_id;
  r.territory = curve.territory;
  r.fps_raw = curve.fps_raw;
  const auto raw = compute_tmpfc(det);
  r.qc = apply_qc(det, raw, qc, f2_confirm_frames);
  if (r.qc.verdict != QcVerdict::Pass) return r;
  r.tmpfc_raw = raw;
  r.tmpfc_normalized = normalize_tmpfc(static_cast<double>(*raw), curve.fps_raw);
  r.cmvd_positive = classify_cmvd(*r.tmpfc_normalized, cls.threshold);
  r.band = stratify(*r.tmpfc_normalized, cls.bands);
  return r;
}

}  // namespace tmpfc
