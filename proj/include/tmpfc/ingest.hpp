#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmpfc/types.hpp"

namespace tmpfc {

struct Manifest {
  std::string case_id;
  Territory territory = Territory::LAD;
  double fps_raw = 0.0;
  std::vector<std::filesystem::path> frame_paths;  // absolute or manifest-relative, resolved
  int width = 0;
  int height = 0;
  std::optional<GroupLabel> group_label;
};

struct MaskSequence {
  Manifest manifest;
  std::vector<BinaryGrid> frames;
};

enum class Severity { NonObstructive, Obstructive };

struct Lesion {
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  Severity severity = Severity::NonObstructive;
  double confidence = 0.0;  // carried, not used by the gate
};

struct DetectionRecord {
  std::string case_id;
  std::vector<Lesion> lesions;
};

enum class Route { ProceedTmpfc, ExcludeObstructive };

std::string_view to_string(Route r);

struct GateDecision {
  std::string case_id;
  Route route = Route::ProceedTmpfc;
  std::string reason;
};

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& m);

MaskSequence load_mask_sequence(const Manifest& manifest);

std::vector<DetectionRecord> parse_detection_records(const std::string& json_text);
std::vector<DetectionRecord> load_detection_records(const std::filesystem::path& path);

GateDecision gate_route(const DetectionRecord& record);

/// Routes a case by id; a case with no record proceeds ("no detection record").
GateDecision gate_route(const std::string& case_id, const std::vector<DetectionRecord>& records);

}  // namespace tmpfc
