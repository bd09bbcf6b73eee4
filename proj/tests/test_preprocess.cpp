#include <gtest/gtest.h>

#include <queue>
#include <random>

#include "support.hpp"
#include "tmpfc/error.hpp"
#include "tmpfc/ingest.hpp"
#include "tmpfc/preprocess.hpp"

using namespace tmpfc;

namespace {

// Breadth-first flood fill over the 8-neighbourhood.
BinaryGrid flood_fill_clean(const BinaryGrid& in, std::int64_t min_area) {
  const int w = in.width(), h = in.height();
  BinaryGrid out(w, h);
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (!in.at(x0, y0) || seen[y0 * w + x0]) continue;
      std::vector<std::pair<int, int>> comp;
      std::queue<std::pair<int, int>> q;
      q.push({x0, y0});
      seen[y0 * w + x0] = 1;
      while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop();
        comp.push_back({x, y});
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || !in.at(nx, ny) || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            q.push({nx, ny});
          }
      }
      if (static_cast<std::int64_t>(comp.size()) >= min_area)
        for (auto [x, y] : comp) out.set(x, y, true);
    }
  }
  return out;
}

BinaryGrid filled(int w, int h) {
  BinaryGrid g(w, h);
  for (auto& p : g.pixels()) p = 1;
  return g;
}

}  // namespace

TEST(Params, ResolutionDefaults) {
  auto p = PreprocessParams::defaults_for(512, 512);
  EXPECT_EQ(p.border_band_px, 10);          // round(10.24)
  EXPECT_EQ(p.min_component_area_px, 262);  // round(262.144)
  auto small = PreprocessParams::defaults_for(64, 64);
  EXPECT_EQ(small.border_band_px, 4);
  EXPECT_EQ(small.min_component_area_px, 16);
  auto wide = PreprocessParams::defaults_for(1024, 256);
  EXPECT_EQ(wide.border_band_px, 5);
  EXPECT_EQ(wide.min_component_area_px, 262);
}

TEST(Params, Validate) {
  PreprocessParams p{5, 16};
  EXPECT_NO_THROW(p.validate(11, 11));
  try {
    p.validate(10, 40);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BandTooWide);
  }
  EXPECT_THROW((PreprocessParams{1, 0}.validate(10, 10)), Error);
}

TEST(StripBorder, Examples) {
  const auto all = filled(10, 10);
  EXPECT_EQ(strip_border(all, 0), all);
  EXPECT_EQ(strip_border(all, 2).count(), 36u);
  const auto inner = strip_border(all, 2);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) EXPECT_EQ(inner.at(x, y), x >= 2 && x < 8 && y >= 2 && y < 8);

  BinaryGrid edge(10, 10);
  edge.set(5, 0, true);
  EXPECT_EQ(strip_border(edge, 1).count(), 0u);
  EXPECT_THROW(strip_border(all, 5), Error);
}

TEST(Components, Examples) {
  BinaryGrid g(120, 120);
  for (int y = 20; y < 100; ++y)
    for (int x = 20; x < 100; ++x) g.set(x, y, true);  // 6400 px
  g.set(2, 2, true);
  g.set(3, 2, true);
  g.set(2, 3, true);
  const auto cleaned = remove_small_components(g, 16);
  EXPECT_EQ(cleaned.count(), 6400u);
  EXPECT_FALSE(cleaned.at(2, 2));
  EXPECT_EQ(remove_small_components(g, 1), g);

  BinaryGrid diag(4, 4);
  diag.set(1, 1, true);
  diag.set(2, 2, true);
  EXPECT_EQ(remove_small_components(diag, 2).count(), 2u);
  EXPECT_EQ(remove_small_components(diag, 3).count(), 0u);
}

TEST(Components, MatchesFloodFillOnRandomFrames) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 90), h = 1 + static_cast<int>(rng() % 90);
    const double density = 0.05 + 0.6 * static_cast<double>(rng() % 100) / 100.0;
    const auto g = testkit::random_grid(w, h, density, rng);
    const std::int64_t min_area = 1 + static_cast<std::int64_t>(rng() % 40);
    const auto expected = flood_fill_clean(g, min_area);
    ASSERT_EQ(remove_small_components(g, min_area), expected) << "trial " << trial;
    ASSERT_EQ(count_retained_pixels(g, min_area), static_cast<std::int64_t>(expected.count())) << "trial " << trial;
  }
}

TEST(Components, SnakeShapedComponentJoinsLate) {
  // A 23-pixel U shape whose two arms only meet at the bottom row; run merging has to
  // union labels discovered independently.
  BinaryGrid g(9, 9);
  for (int y = 0; y < 9; ++y) {
    g.set(1, y, true);
    g.set(7, y, true);
  }
  for (int x = 1; x < 8; ++x) g.set(x, 8, true);
  EXPECT_EQ(remove_small_components(g, 23).count(), 23u);
  EXPECT_EQ(remove_small_components(g, 24).count(), 0u);
}

TEST(Cleaning, IdempotentAndMonotone) {
  std::mt19937_64 rng(77);
  const PreprocessParams p{3, 12};
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testkit::random_grid(40, 30, 0.35, rng);
    const auto once = remove_small_components(strip_border(g, p.border_band_px), p.min_component_area_px);
    const auto twice = remove_small_components(strip_border(once, p.border_band_px), p.min_component_area_px);
    ASSERT_EQ(once, twice);
    ASSERT_LE(once.count(), g.count());
    ASSERT_EQ(cleaned_count(g, p), static_cast<std::int64_t>(once.count()));
  }
}

TEST(Cleaning, BorderStripRunsBeforeComponentFilter) {
  // 20 pixels total, 12 of them inside the band: what survives is too small.
  BinaryGrid g(30, 30);
  for (int x = 10; x < 15; ++x)
    for (int y = 0; y < 4; ++y) g.set(x, y, true);
  EXPECT_EQ(cleaned_count(g, {3, 16}), 0);
  EXPECT_EQ(count_retained_pixels(g, 16), 20);
}

TEST(Curve, ExtractCounts) {
  MaskSequence seq;
  seq.manifest.case_id = "c";
  seq.manifest.territory = Territory::RCA;
  seq.manifest.fps_raw = 12.5;
  seq.manifest.width = seq.manifest.height = 200;
  BinaryGrid empty(200, 200), vessel(200, 200), small(200, 200), speck(200, 200);
  for (int y = 50; y < 150; ++y)
    for (int x = 50; x < 100; ++x) vessel.set(x, y, true);  // 5000
  for (int y = 50; y < 60; ++y)
    for (int x = 50; x < 70; ++x) small.set(x, y, true);  // 200
  speck.set(100, 100, true);
  speck.set(101, 100, true);
  speck.set(100, 101, true);
  seq.frames = {empty, vessel, small, speck};
  const auto curve = extract_opacity_curve(seq, PreprocessParams::defaults_for(200, 200));
  EXPECT_EQ(curve.a, (std::vector<std::int64_t>{0, 5000, 200, 0}));
  EXPECT_EQ(curve.territory, Territory::RCA);
  EXPECT_DOUBLE_EQ(curve.fps_raw, 12.5);
}
