#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmpfc/app/config.hpp"
#include "tmpfc/app/report.hpp"
#include "tmpfc/ingest.hpp"

namespace tmpfc::app {

/// Sorted *.json files directly under dir; throws Error(EmptyInput,
/// "no manifests found") when there are none.
std::vector<std::filesystem::path> find_manifests(const std::filesystem::path& dir);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct BatchFailure {
  std::string case_id;
  std::string code;
  std::string message;
};

struct BatchResult {
  std::vector<ReportRow> rows;  // stable-sorted by case_id
  std::vector<GateDecision> gated;
  std::vector<BatchFailure> failures;
  std::size_t processed = 0;  // reached quantification (pass or QC exclusion)

  std::size_t succeeded() const { return processed + gated.size(); }
  std::string csv() const;
  std::string summary_json() const;
};

struct BatchOutputs {
  std::filesystem::path dir;  // results.csv, summary.json, cases/
  bool plots = false;         // plots/<case>.svg
};

BatchResult run_batch(const std::vector<std::filesystem::path>& manifest_paths,
                      const std::optional<std::vector<DetectionRecord>>& detections, const RunConfig& config,
                      const std::optional<BatchOutputs>& outputs = std::nullopt);

/// Same pipeline over in-memory stacks (no gate, no files).
BatchResult run_batch(const std::vector<MaskSequence>& sequences, const RunConfig& config);

}  // namespace tmpfc::app
