#include "tmpfc/app/report.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "tmpfc/app/svg.hpp"

namespace tmpfc::app {
namespace {

using nlohmann::ordered_json;

template <typename T>
std::string opt_int(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::string opt_bool(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : ""; }

template <typename T>
ordered_json opt_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

ReportRow make_row(const CaseOutcome& o) {
  ReportRow r;
  const auto& d = o.detection;
  const auto& res = o.result;
  r.case_id = o.manifest.case_id;
  r.territory = o.manifest.territory;
  r.fps_raw = o.manifest.fps_raw;
  r.f_max = d.f_max;
  r.a_max = d.a_max;
  r.f1 = d.f1;
  r.f2 = d.f2;
  r.t_f1 = d.t_f1;
  r.t_f2 = d.t_f2;
  r.tmpfc_raw = res.tmpfc_raw;
  r.tmpfc_normalized = res.tmpfc_normalized;
  r.qc_verdict = std::string(to_string(res.qc.verdict));
  r.low_confidence = res.qc.low_confidence;
  r.cmvd_positive = res.cmvd_positive;
  if (res.band) r.band = res.band->value;
  return r;
}

ReportRow gate_row(const Manifest& m, const GateDecision& decision) {
  ReportRow r;
  r.case_id = m.case_id;
  r.territory = m.territory;
  r.fps_raw = m.fps_raw;
  r.qc_verdict = std::string(to_string(decision.route));
  return r;
}

ReportRow error_row(const std::string& case_id, ErrorCode code) {
  ReportRow r;
  r.case_id = case_id;
  r.qc_verdict = "ERROR_" + std::string(to_string(code));
  return r;
}

std::string csv_header() {
  std::string s;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    if (i) s += ',';
    s += kReportColumns[i];
  }
  return s;
}

std::string to_csv_line(const ReportRow& r) {
  const std::array<std::string, 15> cells = {
      r.case_id,
      r.territory ? std::string(to_string(*r.territory)) : std::string(),
      opt_real(r.fps_raw),
      opt_int(r.f_max),
      opt_int(r.a_max),
      opt_int(r.f1),
      opt_int(r.f2),
      opt_real(r.t_f1),
      opt_real(r.t_f2),
      opt_int(r.tmpfc_raw),
      opt_real(r.tmpfc_normalized),
      r.qc_verdict,
      opt_bool(r.low_confidence),
      opt_bool(r.cmvd_positive),
      r.band ? std::string(to_string(*r.band)) : std::string(),
  };
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      s += '"';
      for (char ch : c) {
        if (ch == '"') s += '"';
        s += ch;
      }
      s += '"';
    } else {
      s += c;
    }
  }
  return s;
}

std::string case_json(const CaseOutcome& o) {
  const auto& d = o.detection;
  const auto& r = o.result;
  ordered_json doc;
  doc["case_id"] = o.manifest.case_id;
  doc["territory"] = std::string(to_string(o.manifest.territory));
  doc["fps_raw"] = o.manifest.fps_raw;
  doc["width"] = o.manifest.width;
  doc["height"] = o.manifest.height;
  doc["frames"] = o.curve.a.size();
  doc["preprocess"] = {{"border_band_px", o.preprocess.border_band_px},
                       {"min_component_area_px", o.preprocess.min_component_area_px}};
  doc["curve"] = {{"a", o.curve.a}, {"smoothed", d.smoothed}};
  doc["detection"] = {
      {"median_window", d.median_window},
      {"f_max", d.f_max},
      {"a_max", d.a_max},
      {"w_max", {d.w_max.first, d.w_max.last}},
      {"near_peak_quantile", d.near_peak_quantile},
      {"t_f1", d.t_f1},
      {"t1", d.t1},
      {"t2", d.t2},
      {"t_f2", d.t_f2},
      {"f1", opt_json(d.f1)},
      {"f1_confirmed", d.f1_confirmed},
      {"f2", opt_json(d.f2)},
      {"f2_confirm_count", d.f2_confirm_count},
  };
  ordered_json res = {
      {"tmpfc_raw", opt_json(r.tmpfc_raw)},
      {"tmpfc_normalized", opt_json(r.tmpfc_normalized)},
      {"qc_verdict", std::string(to_string(r.qc.verdict))},
      {"low_confidence", r.qc.low_confidence},
      {"qc_detail", r.qc.detail},
      {"cmvd_positive", opt_json(r.cmvd_positive)},
  };
  if (r.band) {
    res["band"] = std::string(to_string(r.band->value));
    res["band_bounds"] = {r.band->bounds_used.low, r.band->bounds_used.intermediate, r.band->bounds_used.high};
  } else {
    res["band"] = nullptr;
  }
  doc["result"] = std::move(res);
  return doc.dump(2) + "\n";
}

std::string curve_svg(const CaseOutcome& o) {
  const auto& d = o.detection;
  std::vector<double> xs(o.curve.a.size()), raw(o.curve.a.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    xs[t] = static_cast<double>(t);
    raw[t] = static_cast<double>(o.curve.a[t]);
  }
  Plot plot(720, 400, o.manifest.case_id + " (" + std::string(to_string(o.manifest.territory)) + ")", "frame index",
            "segmented pixel count A_t");
  plot.include(xs, raw);
  plot.include_point(0.0, 0.0);
  plot.polyline(xs, raw, "#999999");
  plot.polyline(xs, d.smoothed, "#1f77b4");
  plot.hline(d.t_f1, "#2ca02c", "T_F1 = " + format_real(d.t_f1));
  plot.hline(d.t_f2, "#d62728", "T_F2 = " + format_real(d.t_f2));
  if (d.f1) plot.vline(*d.f1, "#2ca02c", "F1 = " + std::to_string(*d.f1));
  if (d.f2) plot.vline(*d.f2, "#d62728", "F2 = " + std::to_string(*d.f2));
  plot.note("QC " + std::string(to_string(o.result.qc.verdict)));
  if (o.result.tmpfc_normalized) plot.note("TMPFC " + format_real(*o.result.tmpfc_normalized) + " frames @30fps");
  return svg_document({plot});
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned long> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "_" +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string());
  }
}

}  // namespace tmpfc::app
