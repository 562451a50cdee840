#include <gtest/gtest.h>

#include "maskforge/color.hpp"
#include "oracles.hpp"

using maskforge::gray_to_lab;
using maskforge::rgb_to_lab;

TEST(RgbToLab, White) {
  const auto lab = rgb_to_lab({255, 255, 255});
  EXPECT_NEAR(lab.L, 100.0, 1e-3);
  EXPECT_NEAR(lab.a, 0.0, 1e-3);
  EXPECT_NEAR(lab.b, 0.0, 1e-3);
}

TEST(RgbToLab, Black) {
  const auto lab = rgb_to_lab({0, 0, 0});
  EXPECT_NEAR(lab.L, 0.0, 1e-3);
  EXPECT_NEAR(lab.a, 0.0, 1e-3);
  EXPECT_NEAR(lab.b, 0.0, 1e-3);
}

TEST(RgbToLab, MidGrayLightnessMatchesReference) {
  const auto lab = rgb_to_lab({119, 119, 119});
  EXPECT_NEAR(lab.L, oracle::srgb_to_lab(119, 119, 119).L, 1e-3);
}

TEST(RgbToLab, AgreesWithReferenceOverTheCube) {
  for (int r = 0; r < 256; r += 17)
    for (int g = 0; g < 256; g += 17)
      for (int b = 0; b < 256; b += 17) {
        const auto got = rgb_to_lab({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                     static_cast<std::uint8_t>(b)});
        const auto want = oracle::srgb_to_lab(r, g, b);
        ASSERT_NEAR(got.L, want.L, 0.05);
        ASSERT_NEAR(got.a, want.a, 0.05);
        ASSERT_NEAR(got.b, want.b, 0.05);
        ASSERT_GE(got.L, 0.0);
        ASSERT_LE(got.L, 100.0 + 1e-9);
      }
}

TEST(GrayToLab, HasNoChroma) {
  for (int v = 0; v < 256; ++v) {
    const auto lab = gray_to_lab(static_cast<std::uint8_t>(v));
    ASSERT_EQ(lab.a, 0.0);
    ASSERT_EQ(lab.b, 0.0);
    ASSERT_NEAR(lab.L, oracle::srgb_to_lab(v, v, v).L, 1e-3);
  }
}
