#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "maskforge/error.hpp"
#include "maskforge/superpixel.hpp"
#include "oracles.hpp"

using namespace maskforge;

namespace {

void expect_map_invariants(const SuperpixelMap& map) {
  ASSERT_EQ(map.labels.size(), static_cast<std::size_t>(map.width) * map.height);
  ASSERT_GE(map.region_count, 1);
  std::vector<int> seen(map.region_count, 0);
  for (int v : map.labels) {
    ASSERT_GE(v, 0);
    ASSERT_LT(v, map.region_count);
    ++seen[v];
  }
  for (int c : seen) ASSERT_GT(c, 0);
  const auto pieces = oracle::pieces_per_label(map.labels, map.width, map.height, map.region_count);
  for (int p : pieces) ASSERT_EQ(p, 1);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::io_failure;
}

}  // namespace

TEST(SeedLattice, SpacingAndOrder) {
  const auto seeds = slic_seed_lattice(16, 16, 4);
  ASSERT_EQ(seeds.size(), 4u);
  EXPECT_EQ(seeds[0].x, 4.0);
  EXPECT_EQ(seeds[0].y, 4.0);
  EXPECT_EQ(seeds[1].x, 12.0);
  EXPECT_EQ(seeds[3].y, 12.0);

  const auto truncated = slic_seed_lattice(10, 10, 3);
  EXPECT_EQ(truncated.size(), 3u);
}

TEST(ComputeSlic, UniformQuadrants) {
  for (double m : {0.5, 10.0, 40.0}) {
    const auto img = fixture::uniform(16, 16, 90, 140, 200);
    const auto map = compute_slic(img, {4, m, 10});
    ASSERT_EQ(map.region_count, 4);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        ASSERT_EQ(map.at(x, y), (y / 8) * 2 + x / 8) << x << "," << y << " m=" << m;
  }
}

TEST(ComputeSlic, SingleRegion) {
  std::mt19937_64 rng(1);
  const auto img = fixture::random_image(rng, 23, 17, 3);
  const auto map = compute_slic(img, {1, 10, 5});
  EXPECT_EQ(map.region_count, 1);
  for (int v : map.labels) ASSERT_EQ(v, 0);
}

TEST(ComputeSlic, ColorEdgePurity) {
  const auto img = fixture::half_and_half(32, 32);
  const auto map = compute_slic(img, {4, 10, 10});
  expect_map_invariants(map);
  std::vector<int> black(map.region_count), white(map.region_count);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) (x < 16 ? black : white)[map.at(x, y)]++;
  for (int r = 0; r < map.region_count; ++r) {
    const int total = black[r] + white[r];
    EXPECT_GE(std::max(black[r], white[r]), 0.99 * total) << "region " << r;
  }
}

TEST(ComputeSlic, InvalidParams) {
  const auto img = fixture::uniform(4, 4, 0, 0, 0);
  EXPECT_EQ(code_of([&] { compute_slic(img, {17, 10, 1}); }), ErrorCode::invalid_params);
  EXPECT_EQ(code_of([&] { compute_slic(img, {0, 10, 1}); }), ErrorCode::invalid_params);
  EXPECT_EQ(code_of([&] { compute_slic(img, {4, 0, 1}); }), ErrorCode::invalid_params);
  EXPECT_EQ(code_of([&] { compute_slic(img, {4, std::nan(""), 1}); }), ErrorCode::invalid_params);
  EXPECT_EQ(code_of([&] { compute_slic(img, {4, 10, -1}); }), ErrorCode::invalid_params);
  EXPECT_NO_THROW(compute_slic(img, {16, 10, 0}));
}

TEST(ComputeSlic, ZeroIterationsIsSeedVoronoi) {
  const auto img = fixture::uniform(12, 12, 10, 10, 10);
  const auto map = compute_slic(img, {9, 10, 0});
  EXPECT_EQ(map.region_count, 9);
  EXPECT_TRUE(map.seed_movement.empty());
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) ASSERT_EQ(map.at(x, y), (y / 4) * 3 + x / 4);
}

TEST(ComputeSlic, InvariantsOnRandomImages) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dim(4, 64), iters(0, 8);
  std::uniform_real_distribution<double> m(0.5, 40.0);
  for (int t = 0; t < 30; ++t) {
    const int w = dim(rng), h = dim(rng);
    const auto img = fixture::random_image(rng, w, h, t % 3 == 0 ? 1 : 3);
    std::uniform_int_distribution<int> kd(1, std::min(w * h, 300));
    const SlicParams params{kd(rng), m(rng), iters(rng)};
    const auto map = compute_slic(img, params);
    expect_map_invariants(map);
    EXPECT_EQ(map.seed_movement.size(), static_cast<std::size_t>(params.iterations));
    EXPECT_EQ(map.image_digest, image_digest(img));
    EXPECT_EQ(map.params, params);
  }
}

TEST(ComputeSlic, RegionCountStaysInBand) {
  // Very low compactness on noisy input legitimately shatters regions, so the
  // band is checked over the usual compactness range.
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<int> dim(4, 64), iters(1, 10);
  std::uniform_real_distribution<double> m(5.0, 40.0);
  for (int t = 0; t < 40; ++t) {
    const int w = dim(rng), h = dim(rng);
    const auto img = fixture::random_image(rng, w, h, 3);
    std::uniform_int_distribution<int> kd(1, std::min(w * h, 300));
    const SlicParams params{kd(rng), m(rng), iters(rng)};
    const auto map = compute_slic(img, params);
    EXPECT_GE(map.region_count, 1);
    EXPECT_LE(map.region_count, 2 * params.k) << w << "x" << h << " k=" << params.k;
  }
}

TEST(ComputeSlic, DeterministicAcrossParallelism) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 10; ++t) {
    const auto img = fixture::random_image(rng, 48, 40, 3);
    const SlicParams params{40, 12.0, 6};
    SlicOptions serial;
    serial.parallel = false;
    const auto a = compute_slic(img, params, serial);
    const auto b = compute_slic(img, params, serial);
    ASSERT_EQ(a.labels, b.labels);
    for (int threads : {1, 2, 4, 7}) {
      SlicOptions par;
      par.threads = threads;
      const auto c = compute_slic(img, params, par);
      ASSERT_EQ(a.labels, c.labels) << threads;
      ASSERT_EQ(a.seed_movement, c.seed_movement);
    }
  }
}

TEST(ComputeSlic, SeedMovementSettles) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto img = fixture::random_image(rng, 64, 64, 3);
    const auto map = compute_slic(img, {50, 10, 10});
    ASSERT_EQ(map.seed_movement.size(), 10u);
    EXPECT_LE(map.seed_movement.back(), map.seed_movement.front() + 1e-9);
  }
}

TEST(ComputeSlic, CancellationRaisesSuperseded) {
  const auto img = fixture::uniform(16, 16, 1, 2, 3);
  SlicOptions options;
  options.cancelled = [] { return true; };
  EXPECT_EQ(code_of([&] { compute_slic(img, {4, 10, 3}, options); }), ErrorCode::superseded);
}

TEST(EnforceConnectivity, ConnectedLabelingOnlyRenumbers) {
  const std::vector<int> labels{7, 7, 3, 3,
                                7, 7, 3, 3,
                                9, 9, 9, 9};
  const auto out = enforce_connectivity(labels, 4, 3, 1);
  EXPECT_EQ(out.region_count, 3);
  EXPECT_EQ(out.labels, (std::vector<int>{0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 2, 2}));
}

TEST(EnforceConnectivity, StrayPixelAbsorbed) {
  std::vector<int> labels(25, 2);
  labels[12] = 5;
  const auto out = enforce_connectivity(labels, 5, 5, 4);
  EXPECT_EQ(out.region_count, 1);
  for (int v : out.labels) EXPECT_EQ(v, 0);
}

TEST(EnforceConnectivity, SplitsDisconnectedLabel) {
  const std::vector<int> labels{1, 0, 1,
                                1, 0, 1,
                                1, 0, 1};
  const auto out = enforce_connectivity(labels, 3, 3, 1);
  EXPECT_EQ(out.region_count, 3);
  EXPECT_EQ(out.labels, (std::vector<int>{0, 1, 2, 0, 1, 2, 0, 1, 2}));
}

TEST(EnforceConnectivity, RandomLabelingsSatisfyInvariants) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    std::uniform_int_distribution<int> value(0, 1 + t % 6), min_size(1, 12);
    std::vector<int> labels(256);
    for (int& v : labels) v = value(rng);
    const int ms = min_size(rng);
    const auto out = enforce_connectivity(labels, 16, 16, ms);
    SuperpixelMap map;
    map.width = map.height = 16;
    map.labels = out.labels;
    map.region_count = out.region_count;
    expect_map_invariants(map);
    // Compact first-encounter numbering.
    int next = 0;
    for (int v : out.labels) {
      ASSERT_LE(v, next);
      if (v == next) ++next;
    }
    // Every region meets the size floor unless it is the only region.
    if (out.region_count > 1) {
      std::vector<int> sizes(out.region_count);
      for (int v : out.labels) ++sizes[v];
      for (int s : sizes) ASSERT_GE(s, ms);
    }
  }
}

TEST(MarkSuperpixel, QuadrantClick) {
  const auto img = fixture::uniform(16, 16, 50, 50, 50);
  const auto map = compute_slic(img, {4, 10, 10});
  MaskLayer layer("c", 16, 16);
  mark_superpixel(layer, map, {3.5, 3.5}, image_digest(img));
  EXPECT_EQ(layer.count(), 64u);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_TRUE(layer.get(x, y));
  const auto once = layer;
  mark_superpixel(layer, map, {3.5, 3.5}, image_digest(img));
  EXPECT_EQ(layer, once);
}

TEST(MarkSuperpixel, Errors) {
  const auto img = fixture::uniform(16, 16, 50, 50, 50);
  const auto map = compute_slic(img, {4, 10, 10});
  MaskLayer layer("c", 16, 16);
  EXPECT_EQ(code_of([&] { mark_superpixel(layer, map, {3.5, 3.5}, "0000000000000000"); }),
            ErrorCode::stale_superpixel_map);
  EXPECT_EQ(code_of([&] { mark_superpixel(layer, map, {16.0, 3.0}, map.image_digest); }),
            ErrorCode::point_outside_image);
  EXPECT_EQ(code_of([&] { mark_superpixel(layer, map, {-0.1, 3.0}, map.image_digest); }),
            ErrorCode::point_outside_image);
  MaskLayer wrong("c", 8, 8);
  EXPECT_EQ(code_of([&] { mark_superpixel(wrong, map, {3.5, 3.5}, map.image_digest); }),
            ErrorCode::dimension_mismatch);
  EXPECT_EQ(layer.count(), 0u);
}

TEST(MarkSuperpixel, SetsExactlyOneConnectedRegion) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto img = fixture::random_image(rng, 40, 30, 3);
    const auto map = compute_slic(img, {30, 10, 5});
    std::uniform_real_distribution<double> ux(0, 40), uy(0, 30);
    const Point2 p{ux(rng), uy(rng)};
    MaskLayer layer("c", 40, 30);
    mark_superpixel(layer, map, p, map.image_digest);
    const int region = map.at(static_cast<int>(p.x), static_cast<int>(p.y));
    for (std::size_t i = 0; i < map.labels.size(); ++i)
      ASSERT_EQ(layer.bits()[i] != 0, map.labels[i] == region);
    ASSERT_EQ(oracle::count_components(oracle::union_find_labels(layer, false)), 1);
  }
}

TEST(RenderBoundaries, PaintsOnlyRegionEdges) {
  const auto img = fixture::uniform(16, 16, 0, 0, 255);
  const auto map = compute_slic(img, {4, 10, 10});
  const auto out = render_boundaries(img, map);
  ASSERT_EQ(out.channels, 3);
  int painted = 0;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (out.rgb(x, y) == Rgb{255, 255, 0}) ++painted;
      else EXPECT_EQ(out.rgb(x, y), (Rgb{0, 0, 255}));
  EXPECT_GT(painted, 0);
  EXPECT_LT(painted, 16 * 16 / 2);
  EXPECT_EQ(out.rgb(3, 3), (Rgb{0, 0, 255}));
}
