#include "tmpfc/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "tmpfc/error.hpp"

namespace tmpfc::app {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::InvalidParams, "config line " + std::to_string(line) + ": " + msg);
}

double to_double(const Entry& e) {
  double v = 0.0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(e.line, "expected a number, got '" + e.value + "'");
  return v;
}

long long to_int(const Entry& e) {
  long long v = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(e.line, "expected an integer, got '" + e.value + "'");
  return v;
}

std::string to_str(const Entry& e) {
  if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') return e.value.substr(1, e.value.size() - 2);
  return e.value;
}

std::vector<double> to_list(const Entry& e) {
  std::string body = e.value;
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') fail(e.line, "expected a [a, b, c] list");
  body = body.substr(1, body.size() - 2);
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double({trim(item), e.line}));
  return out;
}

using Section = std::map<std::string, Entry>;

void apply_detect(const Section& s, DetectionParams& p) {
  for (const auto& [key, e] : s) {
    if (key == "n1") p.n1 = static_cast<int>(to_int(e));
    else if (key == "q_fill") p.q_fill = to_double(e);
    else if (key == "n2") p.n2 = static_cast<int>(to_int(e));
    else if (key == "delta1") p.delta1 = to_double(e);
    else if (key == "delta2") p.delta2 = to_double(e);
    else if (key == "median_frac") p.median_frac = to_double(e);
    else if (key == "median_min") p.median_min = static_cast<int>(to_int(e));
    else if (key == "median_max") p.median_max = static_cast<int>(to_int(e));
    else if (key == "f1_confirm_frames") p.f1_confirm_frames = static_cast<int>(to_int(e));
    else if (key == "f2_confirm_frames") p.f2_confirm_frames = static_cast<int>(to_int(e));
    else fail(e.line, "unknown detect key '" + key + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  for (auto t : kAllTerritories) profile[t].validate();
  if (qc.min_peak < 0 || qc.min_tmpfc < 0) throw Error(ErrorCode::InvalidParams, "QC thresholds must be non-negative");
  const auto& b = classification.bands;
  if (!(b.low <= b.intermediate && b.intermediate <= b.high)) {
    throw Error(ErrorCode::InvalidParams, "band cut points must be non-decreasing");
  }
  if (jobs < 1) throw Error(ErrorCode::InvalidParams, "jobs must be >= 1");
  if (preprocess.border_band_px && *preprocess.border_band_px < 0) {
    throw Error(ErrorCode::InvalidParams, "border band must be non-negative");
  }
  if (preprocess.min_component_area_px && *preprocess.min_component_area_px < 1) {
    throw Error(ErrorCode::InvalidParams, "min component area must be >= 1");
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::vector<std::string> known = {"preprocess", "detect", "detect.LAD", "detect.LCX",
                                                     "detect.RCA", "qc",     "classify",   "run"};
      if (std::find(known.begin(), known.end(), current) == known.end()) fail(line_no, "unknown section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    if (current.empty()) fail(line_no, "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    sections[current][key] = Entry{trim(std::string_view(line).substr(eq + 1)), line_no};
  }

  RunConfig cfg = std::move(base);
  for (const auto& [key, e] : sections["preprocess"]) {
    if (key == "border_band") cfg.preprocess.border_band_px = static_cast<int>(to_int(e));
    else if (key == "min_component_area") cfg.preprocess.min_component_area_px = to_int(e);
    else fail(e.line, "unknown preprocess key '" + key + "'");
  }
  for (auto t : kAllTerritories) apply_detect(sections["detect"], cfg.profile[t]);
  for (auto t : kAllTerritories) apply_detect(sections["detect." + std::string(to_string(t))], cfg.profile[t]);
  for (const auto& [key, e] : sections["qc"]) {
    if (key == "min_peak") cfg.qc.min_peak = to_int(e);
    else if (key == "min_tmpfc") cfg.qc.min_tmpfc = to_int(e);
    else fail(e.line, "unknown qc key '" + key + "'");
  }
  for (const auto& [key, e] : sections["classify"]) {
    if (key == "threshold") {
      cfg.classification.threshold = to_double(e);
    } else if (key == "bands") {
      const auto v = to_list(e);
      if (v.size() != 3) fail(e.line, "bands needs exactly three cut points");
      cfg.classification.bands = {v[0], v[1], v[2]};
    } else {
      fail(e.line, "unknown classify key '" + key + "'");
    }
  }
  for (const auto& [key, e] : sections["run"]) {
    if (key == "jobs") cfg.jobs = static_cast<int>(to_int(e));
    else if (key == "output_dir") cfg.output_dir = to_str(e);
    else fail(e.line, "unknown run key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  return parse_config({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}, std::move(base));
}

}  // namespace tmpfc::app
