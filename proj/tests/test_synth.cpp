#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "tmpfc/error.hpp"
#include "tmpfc/oracle.hpp"
#include "tmpfc/preprocess.hpp"
#include "tmpfc/synth.hpp"

using namespace tmpfc;
using namespace tmpfc::synth;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(GenCurve, PlateauIsExact) {
  SynthParams p;  // baseline 0, peak 1000, phases (2, 5, 8), tau 2, length 30
  const auto seq = gen_curve(p);
  ASSERT_EQ(seq.curve.a.size(), 30u);
  for (int t : {5, 6, 7}) EXPECT_EQ(seq.curve.a[static_cast<std::size_t>(t)], 1000);
  EXPECT_EQ(seq.curve.a[0], 0);
  EXPECT_EQ(seq.curve.a[3], 333);
  EXPECT_EQ(seq.curve.a[9], 607);  // 1000 * exp(-1/2)
  EXPECT_EQ(seq.curve.a, seq.noise_free);
}

TEST(GenCurve, TruthFromOracleOnNoiseFreeCurve) {
  SynthParams p;
  const auto seq = gen_curve(p);
  EXPECT_EQ(seq.truth_f1, p.plateau_start);
  const auto o = oracle_f1_f2(seq.curve, DetectionParams{});
  EXPECT_EQ(seq.truth_f1, o.f1);
  EXPECT_EQ(seq.truth_f2, o.f2);

  p.noise_sd = 40;
  p.seed = 3;
  const auto noisy = gen_curve(p);
  EXPECT_NE(noisy.curve.a, noisy.noise_free);
  EXPECT_EQ(noisy.truth_f1, seq.truth_f1);
  EXPECT_EQ(noisy.truth_f2, seq.truth_f2);
}

TEST(GenCurve, SeedDeterminism) {
  SynthParams p;
  p.noise_sd = 25;
  p.seed = 77;
  EXPECT_EQ(gen_curve(p).curve.a, gen_curve(p).curve.a);
  auto q = p;
  q.seed = 78;
  EXPECT_NE(gen_curve(p).curve.a, gen_curve(q).curve.a);
  for (auto v : gen_curve(p).curve.a) EXPECT_GE(v, 0);
}

TEST(GenCurve, GaussianSourceIsPortable) {
  // Pinned values: Box-Muller on the raw engine, independent of the
  // standard library's distribution implementations.
  GaussianSource g(42);
  std::mt19937_64 raw(42);
  const double u1 = static_cast<double>(raw() >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(raw() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  EXPECT_DOUBLE_EQ(g.next(), r * std::cos(2 * M_PI * u2));
  EXPECT_DOUBLE_EQ(g.next(), r * std::sin(2 * M_PI * u2));
}

TEST(GenCurve, InvalidPhases) {
  auto bad = [](auto mutate) {
    SynthParams p;
    mutate(p);
    try {
      gen_curve(p);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidPhases);
    }
  };
  bad([](SynthParams& p) { p.plateau_start = p.rise_start; });
  bad([](SynthParams& p) { p.washout_start = 4; });
  bad([](SynthParams& p) { p.washout_start = 30; });
  bad([](SynthParams& p) { p.peak = 0; });
}

TEST(GenCurve, VisibilityFloor) {
  SynthParams p;
  p.visibility_floor = 100;
  const auto seq = gen_curve(p);
  for (auto v : seq.curve.a) EXPECT_TRUE(v == 0 || v >= 100);
}

TEST(Render, EmptyAndExactArea) {
  SynthSequence seq;
  seq.curve = testkit::make_curve({0, 5000, 1});
  seq.params.seed = 1;
  const RenderParams r;
  const auto masks = render_masks(seq, r);
  ASSERT_EQ(masks.frames.size(), 3u);
  EXPECT_EQ(masks.frames[0].count(), 0u);
  EXPECT_EQ(masks.frames[1].count(), 5000u);
  const auto clean = r.resolved_cleaning();
  const auto cleaned = cleaned_count(masks.frames[1], clean);
  EXPECT_GE(cleaned, 4999);
  EXPECT_LE(cleaned, 5001);
}

TEST(Render, ArtifactsAreRemovedByCleaning) {
  SynthSequence seq;
  seq.curve = testkit::make_curve({0, 5000, 300, 0});
  seq.params.speck_count = 6;
  seq.params.border_blob = true;
  seq.params.seed = 9;
  const RenderParams r;
  const auto masks = render_masks(seq, r);
  const auto clean = r.resolved_cleaning();
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_GT(static_cast<std::int64_t>(masks.frames[t].count()), seq.curve.a[t]);
    EXPECT_EQ(cleaned_count(masks.frames[t], clean), seq.curve.a[t]);
  }
  // The blob alone would survive component removal if it were not stripped.
  EXPECT_GE(count_retained_pixels(masks.frames[0], clean.min_component_area_px), 2 * clean.min_component_area_px);
}

TEST(Render, RoundTripOnRandomCurves) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    SynthParams p;
    p.length = 20;
    p.peak = 500 + static_cast<std::int64_t>(rng() % 9000);
    p.noise_sd = static_cast<double>(rng() % 200);
    p.speck_count = static_cast<int>(rng() % 8);
    p.border_blob = rng() % 2;
    p.seed = rng();
    RenderParams r;
    r.width = 128 + static_cast<int>(rng() % 3) * 64;
    r.height = r.width;
    p.visibility_floor = r.resolved_cleaning().min_component_area_px;
    const auto seq = gen_curve(p);
    const auto masks = render_masks(seq, r);
    const auto curve = extract_opacity_curve(masks, r.resolved_cleaning());
    for (std::size_t t = 0; t < seq.curve.a.size(); ++t) ASSERT_LE(std::abs(curve.a[t] - seq.curve.a[t]), 1) << trial;
  }
}

TEST(Render, Deterministic) {
  SynthParams p;
  p.speck_count = 4;
  p.border_blob = true;
  p.noise_sd = 20;
  p.seed = 5;
  const auto a = render_masks(gen_curve(p), {});
  const auto b = render_masks(gen_curve(p), {});
  EXPECT_EQ(a.frames, b.frames);
}

TEST(Render, PeakTooLarge) {
  SynthSequence seq;
  seq.curve = testkit::make_curve({0, 64 * 64});
  RenderParams r;
  r.width = r.height = 64;
  try {
    render_masks(seq, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PeakTooLarge);
  }
}

TEST(Oracle, Examples) {
  const auto fixture = testkit::make_curve({5, 8, 100, 800, 950, 1000, 990, 980, 600, 200, 90, 50, 30, 15, 10, 8, 6, 5,
                                            4, 4, 3});
  const auto o = oracle_f1_f2(fixture, DetectionParams{});
  EXPECT_EQ(o.f1, 4);
  EXPECT_EQ(o.f2, 18);
  EXPECT_EQ(o.window, 3);
  EXPECT_DOUBLE_EQ(o.t_f1, 900);
  EXPECT_DOUBLE_EQ(o.t_f2, 4);
  const auto flat = oracle_f1_f2(testkit::make_curve(std::vector<std::int64_t>(12, 50)), DetectionParams{});
  EXPECT_EQ(flat.f1, 0);
  EXPECT_FALSE(flat.f2);
}

TEST(Cohort, LabelsAndSeeds) {
  const auto cohort = gen_cohort(50, 0.5, 15.0, 11);
  ASSERT_EQ(cohort.size(), 50u);
  int positives = 0;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& m = cohort[i];
    positives += *m.record.cmvd_label;
    EXPECT_EQ(m.sequence.params.seed, 11u ^ i);
    EXPECT_EQ(m.record.case_id, m.sequence.curve.case_id);
    EXPECT_DOUBLE_EQ(m.sequence.curve.fps_raw, 15.0);
    EXPECT_EQ(m.sequence.curve.territory, kAllTerritories[i % 3]);
    ASSERT_TRUE(m.sequence.truth_f1 && m.sequence.truth_f2);
    EXPECT_GT(*m.record.ea_ratio, 0);
    EXPECT_GT(*m.record.ea_prime_ratio, 0);
  }
  EXPECT_EQ(positives, 25);
}

TEST(Cohort, TargetsRealisedAndCentred) {
  const auto cohort = gen_cohort(200, 0.5, 15.0, 2024);
  std::vector<double> pos, neg;
  int realised = 0;
  for (const auto& m : cohort) {
    (*m.record.cmvd_label ? pos : neg).push_back(m.target_normalized);
    const int target_raw = static_cast<int>(std::lround(m.target_normalized * 15.0 / 30.0));
    realised += *m.sequence.truth_f2 - *m.sequence.truth_f1 == target_raw;
  }
  EXPECT_NEAR(median(pos), 117.5, 6.0);
  EXPECT_NEAR(median(neg), 60.0, 4.0);
  EXPECT_GE(median(pos), 110.0);
  EXPECT_LE(median(neg), 65.0);
  EXPECT_GE(realised, 195);  // washout fit hits the raw target almost always
}

TEST(Cohort, DeterministicAndValidated) {
  const auto a = gen_cohort(6, 0.5, 12.5, 99);
  const auto b = gen_cohort(6, 0.5, 12.5, 99);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].sequence.curve.a, b[i].sequence.curve.a);
  EXPECT_THROW(gen_cohort(1, 0.5, 15, 1), Error);
  EXPECT_THROW(gen_cohort(10, 0.0, 15, 1), Error);
  EXPECT_THROW(gen_cohort(10, 1.0, 15, 1), Error);
}
