#include "tmpfc/ingest.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "tmpfc/error.hpp"
#include "tmpfc/pgm.hpp"

namespace tmpfc {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw Error(ErrorCode::MissingField, std::string("manifest lacks '") + key + "'");
  return *it;
}

int line_of(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

// Byte offsets of every '{' outside string literals, in document order. This
// lines up with a pre-order walk of an ordered_json tree.
std::vector<std::size_t> object_offsets(const std::string& text) {
  std::vector<std::size_t> out;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Route r) {
  return r == Route::ProceedTmpfc ? "PROCEED_TMPFC" : "EXCLUDE_OBSTRUCTIVE";
}

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "manifest must be a JSON object");

  Manifest m;
  try {
    m.case_id = require(doc, "case_id").get<std::string>();
    m.territory = parse_territory(require(doc, "territory").get<std::string>());
    m.fps_raw = require(doc, "fps_raw").get<double>();
    m.width = require(doc, "width").get<int>();
    m.height = require(doc, "height").get<int>();
    const json& frames = require(doc, "frames");
    if (!frames.is_array()) throw Error(ErrorCode::ParseError, "'frames' must be an array");
    for (const auto& f : frames) {
      std::filesystem::path p = f.get<std::string>();
      m.frame_paths.push_back(p.is_absolute() ? p : base_dir / p);
    }
    if (auto it = doc.find("group_label"); it != doc.end() && !it->is_null()) {
      const auto s = it->get<std::string>();
      m.group_label = parse_group_label(s);
      if (!m.group_label) throw Error(ErrorCode::ParseError, "unknown group_label '" + s + "'");
    }
  } catch (const json::type_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }

  if (!(m.fps_raw > 0.0)) throw Error(ErrorCode::BadFps, "fps_raw must be > 0 (got " + std::to_string(m.fps_raw) + ")");
  if (m.frame_paths.empty()) throw Error(ErrorCode::EmptyFrames, "manifest '" + m.case_id + "' lists no frames");
  if (m.width <= 0 || m.height <= 0) throw Error(ErrorCode::DimensionMismatch, "width/height must be positive");
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text(path), path.parent_path());
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  ordered_json doc;
  doc["case_id"] = m.case_id;
  doc["territory"] = std::string(to_string(m.territory));
  doc["fps_raw"] = m.fps_raw;
  doc["width"] = m.width;
  doc["height"] = m.height;
  auto frames = ordered_json::array();
  const auto base = path.parent_path();
  for (const auto& f : m.frame_paths) {
    frames.push_back(f.is_absolute() && !base.empty() ? f.lexically_relative(base).generic_string() : f.generic_string());
  }
  doc["frames"] = std::move(frames);
  if (m.group_label) doc["group_label"] = std::string(to_string(*m.group_label));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

MaskSequence load_mask_sequence(const Manifest& manifest) {
  MaskSequence seq;
  seq.manifest = manifest;
  seq.frames.reserve(manifest.frame_paths.size());
  for (const auto& path : manifest.frame_paths) {
    BinaryGrid g = read_pgm_mask(path);
    if (g.width() != manifest.width || g.height() != manifest.height) {
      std::ostringstream msg;
      msg << path.string() << " is " << g.width() << "x" << g.height() << ", manifest declares " << manifest.width
          << "x" << manifest.height;
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    seq.frames.push_back(std::move(g));
  }
  return seq;
}

std::vector<DetectionRecord> parse_detection_records(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_of(json_text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "line 1: detection records must be a JSON array");

  const auto offsets = object_offsets(json_text);
  std::size_t next_object = 0;
  auto fail_at = [&](std::size_t object_index, const std::string& msg) -> void {
    const int line = object_index < offsets.size() ? line_of(json_text, offsets[object_index]) : 1;
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
  };

  std::vector<DetectionRecord> out;
  std::set<std::string> seen;
  for (const auto& rec : doc) {
    const std::size_t rec_obj = next_object;
    if (!rec.is_object()) fail_at(rec_obj, "record must be an object");
    ++next_object;
    DetectionRecord r;
    auto id = rec.find("case_id");
    if (id == rec.end() || !id->is_string()) fail_at(rec_obj, "record lacks string 'case_id'");
    r.case_id = id->get<std::string>();
    auto lesions = rec.find("lesions");
    if (lesions != rec.end() && !lesions->is_null()) {
      if (!lesions->is_array()) fail_at(rec_obj, "'lesions' must be an array");
      for (const auto& l : *lesions) {
        const std::size_t les_obj = next_object;
        if (!l.is_object()) fail_at(rec_obj, "lesion must be an object");
        ++next_object;
        Lesion les;
        auto box = l.find("box");
        if (box == l.end() || !box->is_array() || box->size() != 4) fail_at(les_obj, "lesion 'box' must hold 4 integers");
        for (const auto& v : *box) {
          if (!v.is_number_integer() || v.get<long long>() < 0) fail_at(les_obj, "box coordinates must be non-negative integers");
        }
        les.x_min = (*box)[0].get<int>();
        les.y_min = (*box)[1].get<int>();
        les.x_max = (*box)[2].get<int>();
        les.y_max = (*box)[3].get<int>();
        if (!(les.x_min < les.x_max && les.y_min < les.y_max)) fail_at(les_obj, "box must satisfy x_min<x_max, y_min<y_max");
        auto sev = l.find("severity_class");
        if (sev == l.end() || !sev->is_string()) fail_at(les_obj, "lesion lacks 'severity_class'");
        const auto s = sev->get<std::string>();
        if (s == "obstructive") les.severity = Severity::Obstructive;
        else if (s == "non_obstructive") les.severity = Severity::NonObstructive;
        else fail_at(les_obj, "unknown severity_class '" + s + "'");
        auto conf = l.find("confidence");
        if (conf == l.end() || !conf->is_number()) fail_at(les_obj, "lesion lacks numeric 'confidence'");
        les.confidence = conf->get<double>();
        if (!(les.confidence >= 0.0 && les.confidence <= 1.0)) fail_at(les_obj, "confidence must lie in [0,1]");
        r.lesions.push_back(les);
      }
    }
    if (!seen.insert(r.case_id).second) throw Error(ErrorCode::DuplicateCase, "case_id '" + r.case_id + "' appears twice");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DetectionRecord> load_detection_records(const std::filesystem::path& path) {
  return parse_detection_records(read_text(path));
}

GateDecision gate_route(const DetectionRecord& record) {
  GateDecision d{record.case_id, Route::ProceedTmpfc, "no obstructive lesion"};
  // Name the smallest obstructive box so the reason does not depend on lesion order.
  const Lesion* blocking = nullptr;
  auto key = [](const Lesion& l) { return std::tuple(l.x_min, l.y_min, l.x_max, l.y_max); };
  for (const auto& l : record.lesions) {
    if (l.severity == Severity::Obstructive && (!blocking || key(l) < key(*blocking))) blocking = &l;
  }
  if (blocking) {
    std::ostringstream msg;
    msg << "obstructive lesion at box [" << blocking->x_min << "," << blocking->y_min << "," << blocking->x_max << ","
        << blocking->y_max << "]";
    d.route = Route::ExcludeObstructive;
    d.reason = msg.str();
  }
  return d;
}

GateDecision gate_route(const std::string& case_id, const std::vector<DetectionRecord>& records) {
  for (const auto& r : records) {
    if (r.case_id == case_id) return gate_route(r);
  }
  return {case_id, Route::ProceedTmpfc, "no detection record"};
}

}  // namespace tmpfc
