#include "tmpfc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "tmpfc/error.hpp"
#include "tmpfc/oracle.hpp"
#include "tmpfc/quantify.hpp"

namespace tmpfc::synth {

void SynthParams::validate() const {
  if (!(0 <= rise_start && rise_start < plateau_start && plateau_start <= washout_start && washout_start < length)) {
    throw Error(ErrorCode::InvalidPhases, "require 0 <= rise_start < plateau_start <= washout_start < length");
  }
  if (peak <= baseline || baseline < 0) throw Error(ErrorCode::InvalidPhases, "require peak > baseline >= 0");
  if (!(washout_tau > 0.0)) throw Error(ErrorCode::InvalidPhases, "washout_tau must be > 0");
  if (!(fps > 0.0)) throw Error(ErrorCode::BadFps, "fps must be > 0");
  if (noise_sd < 0.0 || speck_count < 0 || visibility_floor < 0) {
    throw Error(ErrorCode::InvalidParams, "noise, speck count and floor must be non-negative");
  }
}

double GaussianSource::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

double GaussianSource::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::uint64_t GaussianSource::below(std::uint64_t bound) {
  if (bound == 0) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = rng_();
  } while (x >= limit);
  return x % bound;
}

double phase_value(const SynthParams& p, int t) {
  const auto base = static_cast<double>(p.baseline);
  const auto top = static_cast<double>(p.peak);
  if (t < p.rise_start) return base;
  if (t < p.plateau_start) {
    const double frac = static_cast<double>(t - p.rise_start) / static_cast<double>(p.plateau_start - p.rise_start);
    return base + (top - base) * frac;
  }
  if (t < p.washout_start) return top;
  return base + (top - base) * std::exp(-static_cast<double>(t - p.washout_start) / p.washout_tau);
}

SynthSequence gen_curve(const SynthParams& params, const DetectionParams& detection) {
  params.validate();
  SynthSequence seq;
  seq.params = params;
  seq.curve.case_id = params.case_id;
  seq.curve.territory = params.territory;
  seq.curve.fps_raw = params.fps;

  auto finish = [&](double v) {
    auto r = static_cast<std::int64_t>(std::llround(std::max(0.0, v)));
    return r < params.visibility_floor ? std::int64_t{0} : r;
  };
  GaussianSource noise(params.seed);
  for (int t = 0; t < params.length; ++t) {
    const double clean = phase_value(params, t);
    seq.noise_free.push_back(finish(clean));
    const double jitter = params.noise_sd > 0.0 ? params.noise_sd * noise.next() : 0.0;
    seq.curve.a.push_back(finish(clean + jitter));
  }

  OpacityCurve truth_curve = seq.curve;
  truth_curve.a = seq.noise_free;
  const OracleResult truth = oracle_f1_f2(truth_curve, detection);
  seq.truth_f1 = truth.f1;
  seq.truth_f2 = truth.f2;
  return seq;
}

PreprocessParams RenderParams::resolved_cleaning() const {
  return cleaning ? *cleaning : PreprocessParams::defaults_for(width, height);
}

namespace {

struct Pixel {
  int x;
  int y;
};

// Interior pixels (one-pixel gap inside the border band) ordered by distance
// from the frame centre, ties by raster order. Any prefix is 8-connected.
std::vector<Pixel> disk_order(int width, int height, int band) {
  const int lo_x = band + 1, hi_x = width - band - 2;
  const int lo_y = band + 1, hi_y = height - band - 2;
  std::vector<Pixel> px;
  if (hi_x < lo_x || hi_y < lo_y) return px;
  px.reserve(static_cast<std::size_t>(hi_x - lo_x + 1) * static_cast<std::size_t>(hi_y - lo_y + 1));
  for (int y = lo_y; y <= hi_y; ++y) {
    for (int x = lo_x; x <= hi_x; ++x) px.push_back({x, y});
  }
  auto d2 = [&](const Pixel& p) {
    const std::int64_t dx = 2 * p.x - (width - 1);
    const std::int64_t dy = 2 * p.y - (height - 1);
    return dx * dx + dy * dy;
  };
  std::stable_sort(px.begin(), px.end(), [&](const Pixel& a, const Pixel& b) { return d2(a) < d2(b); });
  return px;
}

bool neighbourhood_clear(const BinaryGrid& g, int x, int y) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int xx = x + dx, yy = y + dy;
      if (xx < 0 || yy < 0 || xx >= g.width() || yy >= g.height()) continue;
      if (g.at(xx, yy)) return false;
    }
  }
  return true;
}

// Up to 4 pixels in a short chain, kept at Chebyshev distance >= 2 from any
// existing foreground so it stays its own component.
void place_speck(BinaryGrid& g, int band, GaussianSource& rng) {
  static constexpr int kShapes[4][4][2] = {
      {{0, 0}, {0, 0}, {0, 0}, {0, 0}},
      {{0, 0}, {1, 0}, {0, 0}, {0, 0}},
      {{0, 0}, {1, 0}, {1, 1}, {0, 0}},
      {{0, 0}, {1, 0}, {0, 1}, {1, 1}},
  };
  const int span_x = g.width() - 2 * (band + 2) - 1;
  const int span_y = g.height() - 2 * (band + 2) - 1;
  if (span_x <= 0 || span_y <= 0) return;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto shape = static_cast<int>(rng.below(4));
    const int ox = band + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(span_x)));
    const int oy = band + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(span_y)));
    bool ok = true;
    for (int k = 0; k <= shape && ok; ++k) ok = neighbourhood_clear(g, ox + kShapes[shape][k][0], oy + kShapes[shape][k][1]);
    if (!ok) continue;
    for (int k = 0; k <= shape; ++k) g.set(ox + kShapes[shape][k][0], oy + kShapes[shape][k][1], true);
    return;
  }
}

}  // namespace

MaskSequence render_masks(const SynthSequence& seq, const RenderParams& render) {
  const PreprocessParams clean = render.resolved_cleaning();
  clean.validate(render.width, render.height);
  const int band = clean.border_band_px;
  const auto order = disk_order(render.width, render.height, band);
  const std::int64_t peak = seq.curve.a.empty() ? 0 : *std::max_element(seq.curve.a.begin(), seq.curve.a.end());
  if (peak > static_cast<std::int64_t>(order.size())) {
    throw Error(ErrorCode::PeakTooLarge, "peak " + std::to_string(peak) + " px exceeds drawable interior of " +
                                             std::to_string(order.size()) + " px");
  }

  MaskSequence out;
  out.manifest.case_id = seq.curve.case_id;
  out.manifest.territory = seq.curve.territory;
  out.manifest.fps_raw = seq.curve.fps_raw;
  out.manifest.width = render.width;
  out.manifest.height = render.height;
  out.frames.reserve(seq.curve.a.size());

  // Blob lives entirely inside the stripped band, large enough to survive
  // component removal if the strip were skipped.
  const int blob_rows = std::max(1, band);
  const int blob_len = static_cast<int>(std::min<std::int64_t>(
      render.width - 2 * band - 2, (2 * clean.min_component_area_px + blob_rows - 1) / blob_rows));

  GaussianSource rng(seq.params.seed ^ 0x5851F42D4C957F2DULL);
  for (std::size_t t = 0; t < seq.curve.a.size(); ++t) {
    BinaryGrid g(render.width, render.height);
    const auto n = static_cast<std::size_t>(seq.curve.a[t]);
    for (std::size_t i = 0; i < n; ++i) g.set(order[i].x, order[i].y, true);
    for (int k = 0; k < seq.params.speck_count; ++k) place_speck(g, band, rng);
    if (seq.params.border_blob && band > 0) {
      for (int y = 0; y < blob_rows; ++y) {
        for (int x = band + 1; x < band + 1 + blob_len; ++x) g.set(x, y, true);
      }
    }
    out.frames.push_back(std::move(g));
  }
  return out;
}

namespace {

// Searches the washout time constant so the oracle's count on the noise-free
// curve equals the raw-frame target; returns the closest achievable.
SynthParams fit_washout(SynthParams p, int target_raw, const DetectionParams& det) {
  auto measured = [&](double tau) -> std::optional<int> {
    p.washout_tau = tau;
    const auto seq = gen_curve(p, det);
    if (!seq.truth_f1 || !seq.truth_f2) return std::nullopt;
    return *seq.truth_f2 - *seq.truth_f1;
  };
  double lo = 0.05, hi = static_cast<double>(target_raw);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto m = measured(mid);
    if (!m || *m > target_raw) hi = mid;
    else if (*m < target_raw) lo = mid;
    else {
      hi = mid;
      lo = mid;
      break;
    }
  }
  p.washout_tau = hi;
  return p;
}

double truncated_normal(GaussianSource& g, double mean, double sd, double lo, double hi) {
  for (;;) {
    const double v = mean + sd * g.next();
    if (v >= lo && v <= hi) return v;
  }
}

}  // namespace

std::vector<CohortMember> gen_cohort(int n, double cmvd_fraction, double fps, std::uint64_t seed,
                                     const CohortOptions& options) {
  if (n < 2) throw Error(ErrorCode::InvalidParams, "cohort needs n >= 2");
  if (!(cmvd_fraction > 0.0 && cmvd_fraction < 1.0)) throw Error(ErrorCode::InvalidParams, "cmvd_fraction must lie in (0,1)");
  if (!(fps > 0.0)) throw Error(ErrorCode::BadFps, "fps must be > 0");

  const auto n_pos = static_cast<int>(std::lround(n * cmvd_fraction));
  std::vector<bool> positive(static_cast<std::size_t>(n), false);
  std::fill(positive.begin(), positive.begin() + n_pos, true);
  GaussianSource shuffler(seed);
  for (int i = n - 1; i > 0; --i) {  // Fisher-Yates with a portable bounded draw
    const auto j = static_cast<std::size_t>(shuffler.below(static_cast<std::uint64_t>(i) + 1));
    const bool tmp = positive[static_cast<std::size_t>(i)];
    positive[static_cast<std::size_t>(i)] = positive[j];
    positive[j] = tmp;
  }

  const PreprocessParams clean = PreprocessParams::defaults_for(options.width, options.height);
  const std::int64_t drawable = static_cast<std::int64_t>(options.width - 2 * clean.border_band_px - 2) *
                                (options.height - 2 * clean.border_band_px - 2);
  const DetectionParams det;

  std::vector<CohortMember> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t member_seed = seed ^ static_cast<std::uint64_t>(i);
    GaussianSource g(member_seed);
    const bool pos = positive[static_cast<std::size_t>(i)];
    // Positive targets centre on 117.5 frames at 30 fps, negatives on 60.
    const double target = pos ? truncated_normal(g, 117.5, 16.0, 80.0, 220.0) : truncated_normal(g, 60.0, 9.0, 30.0, 95.0);
    const int target_raw = std::max(1, static_cast<int>(std::lround(target * fps / kReferenceFps)));

    SynthParams p;
    char id[32];
    std::snprintf(id, sizeof id, "case_%04d", i);
    p.case_id = id;
    p.territory = kAllTerritories[static_cast<std::size_t>(i) % kAllTerritories.size()];
    p.fps = fps;
    p.baseline = 0;
    p.peak = static_cast<std::int64_t>(std::llround((0.08 + 0.07 * g.uniform()) * static_cast<double>(drawable)));
    p.rise_start = 6 + static_cast<int>(g.below(5));
    p.plateau_start = p.rise_start + 3 + static_cast<int>(g.below(3));
    p.washout_start = p.plateau_start + 2 + static_cast<int>(g.below(2));
    p.length = p.plateau_start + target_raw + 25;
    p.noise_sd = options.noise_frac * static_cast<double>(p.peak);
    p.speck_count = options.speck_count;
    p.border_blob = options.border_blob;
    p.seed = member_seed;
    p.visibility_floor = clean.min_component_area_px;
    p = fit_washout(p, target_raw, det);

    CohortMember m;
    m.sequence = gen_curve(p, det);
    m.target_normalized = target;
    m.record.case_id = p.case_id;
    m.record.cmvd_label = pos;
    m.record.group_label = pos ? GroupLabel::B_cmvd : GroupLabel::C_control;
    if (m.sequence.truth_f1 && m.sequence.truth_f2) {
      m.record.tmpfc_manual = normalize_tmpfc(static_cast<double>(*m.sequence.truth_f2 - *m.sequence.truth_f1), fps);
    }
    // Illustrative diastolic covariates, falling with transit time for the CMVD group.
    if (pos) {
      m.record.ea_ratio = std::clamp(1.45 - 0.006 * target + 0.03 * g.next(), 0.2, 2.5);
      m.record.ea_prime_ratio = std::clamp(1.35 - 0.0055 * target + 0.03 * g.next(), 0.2, 2.5);
    } else {
      m.record.ea_ratio = std::clamp(1.2 + 0.1 * g.next(), 0.2, 2.5);
      m.record.ea_prime_ratio = std::clamp(1.1 + 0.1 * g.next(), 0.2, 2.5);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace tmpfc::synth
