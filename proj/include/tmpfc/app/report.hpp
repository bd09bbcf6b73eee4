#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tmpfc/app/pipeline.hpp"
#include "tmpfc/error.hpp"
#include "tmpfc/ingest.hpp"

namespace tmpfc::app {

struct ReportRow {
  std::string case_id;
  std::optional<Territory> territory;
  std::optional<double> fps_raw;
  std::optional<int> f_max;
  std::optional<std::int64_t> a_max;
  std::optional<int> f1;
  std::optional<int> f2;
  std::optional<double> t_f1;
  std::optional<double> t_f2;
  std::optional<std::int64_t> tmpfc_raw;
  std::optional<double> tmpfc_normalized;
  std::string qc_verdict;  // QC verdict, EXCLUDE_OBSTRUCTIVE, or ERROR_<CODE>
  std::optional<bool> low_confidence;
  std::optional<bool> cmvd_positive;
  std::optional<Band> band;
};

inline constexpr std::array<std::string_view, 15> kReportColumns = {
    "case_id", "territory", "fps_raw",   "f_max",           "a_max",          "f1",            "f2",  "t_f1",
    "t_f2",    "tmpfc_raw", "tmpfc_normalized", "qc_verdict", "low_confidence", "cmvd_positive", "band"};

ReportRow make_row(const CaseOutcome& outcome);
ReportRow gate_row(const Manifest& manifest, const GateDecision& decision);
ReportRow error_row(const std::string& case_id, ErrorCode code);

std::string csv_header();
std::string to_csv_line(const ReportRow& row);

/// Shortest round-trip decimal, always with a fractional part ("28.0").
std::string format_real(double v);

/// Per-case audit document: manifest facts, cleaning parameters, raw and
/// smoothed curves, every detection intermediate and the final result.
std::string case_json(const CaseOutcome& outcome);

/// A_t (raw and smoothed) with F1/F2 markers and the two thresholds.
std::string curve_svg(const CaseOutcome& outcome);

/// Write to a sibling temp file then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace tmpfc::app
