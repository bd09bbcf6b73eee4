#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tmpfc/detect.hpp"
#include "tmpfc/ingest.hpp"
#include "tmpfc/preprocess.hpp"
#include "tmpfc/stats.hpp"
#include "tmpfc/types.hpp"

namespace tmpfc::synth {

struct SynthParams {
  std::string case_id = "synth";
  Territory territory = Territory::LAD;
  int length = 30;
  double fps = 15.0;
  std::int64_t baseline = 0;
  std::int64_t peak = 1000;
  int rise_start = 2;
  int plateau_start = 5;
  int washout_start = 8;
  double washout_tau = 2.0;  // frames
  double noise_sd = 0.0;     // absolute pixels
  int speck_count = 0;
  bool border_blob = false;
  std::uint64_t seed = 0;
  // Values below this after noise become 0: the territory is too small to
  // survive component cleaning at the rendered resolution. 0 disables.
  std::int64_t visibility_floor = 0;

  /// Throws Error(InvalidPhases) unless rise_start < plateau_start <=
  /// washout_start < length and peak > baseline.
  void validate() const;
};

struct SynthSequence {
  OpacityCurve curve;
  std::vector<std::int64_t> noise_free;
  std::optional<MaskSequence> masks;
  std::optional<int> truth_f1;
  std::optional<int> truth_f2;
  SynthParams params;
};

/// Deterministic normal deviates (Box-Muller over mt19937_64); the standard
/// library's normal_distribution is implementation-defined.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}
  double next();
  double uniform();  // [0, 1)
  std::uint64_t below(std::uint64_t bound);  // uniform integer in [0, bound)
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

/// Noise-free phase value at frame t (before rounding).
double phase_value(const SynthParams& p, int t);

SynthSequence gen_curve(const SynthParams& params, const DetectionParams& detection = {});

struct RenderParams {
  int width = 256;
  int height = 256;
  // Cleaning the renderer targets; defaults to the per-resolution defaults.
  std::optional<PreprocessParams> cleaning;

  PreprocessParams resolved_cleaning() const;
};

/// Draws each frame as a compact disk of exactly a[t] pixels inside the
/// cleaned interior, plus the configured specks and border blob.
/// Throws Error(PeakTooLarge) when max(a) exceeds the drawable interior.
MaskSequence render_masks(const SynthSequence& seq, const RenderParams& render);

struct CohortOptions {
  int width = 256;
  int height = 256;
  double noise_frac = 0.002;  // noise sd as a fraction of peak
  int speck_count = 3;
  bool border_blob = true;
};

struct CohortMember {
  SynthSequence sequence;
  stats::StudyRecord record;
  double target_normalized = 0.0;
};

/// Member i uses seed (seed XOR i). round(n * cmvd_fraction) members are
/// CMVD-positive. Throws Error(InvalidParams) for n < 2 or a fraction outside (0,1).
std::vector<CohortMember> gen_cohort(int n, double cmvd_fraction, double fps, std::uint64_t seed,
                                     const CohortOptions& options = {});

}  // namespace tmpfc::synth
