#pragma once

#include <filesystem>
#include <vector>

#include "tmpfc/ingest.hpp"
#include "tmpfc/synth.hpp"

namespace tmpfc::app {

/// Writes frames/<case>/frame_NNN.pgm and manifests/<case>.json under root
/// and returns the manifest path.
std::filesystem::path write_sequence(const std::filesystem::path& root, const MaskSequence& masks,
                                     std::optional<GroupLabel> group = std::nullopt);

/// Renders every member and writes the tree plus truth.csv and
/// covariates.csv. Throws Error(IoError) when root cannot be written.
void write_cohort(const std::filesystem::path& root, const std::vector<synth::CohortMember>& cohort,
                  const synth::CohortOptions& options);

}  // namespace tmpfc::app
