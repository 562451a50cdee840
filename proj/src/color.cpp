#include "maskforge/color.hpp"

#include <array>
#include <cmath>

namespace maskforge {
namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// sRGB -> XYZ (D65), IEC 61966-2-1.
constexpr std::array<std::array<double, 3>, 3> kRgbToXyz{{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

// Reference white is the matrix image of linear (1, 1, 1), so sRGB white maps
// to a = b = 0 exactly.
constexpr double row_sum(int r) { return kRgbToXyz[r][0] + kRgbToXyz[r][1] + kRgbToXyz[r][2]; }
constexpr double kWhiteX = row_sum(0);
constexpr double kWhiteY = row_sum(1);
constexpr double kWhiteZ = row_sum(2);

constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double lab_f(double t) { return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

// Per-byte lookup of the gamma expansion; built once.
const std::array<double, 256>& linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = srgb_to_linear(i / 255.0);
    return t;
  }();
  return table;
}

}  // namespace

LabColor rgb_to_lab(Rgb rgb) noexcept {
  const auto& lin = linear_table();
  const double r = lin[rgb.r];
  const double g = lin[rgb.g];
  const double b = lin[rgb.b];
  const double x = kRgbToXyz[0][0] * r + kRgbToXyz[0][1] * g + kRgbToXyz[0][2] * b;
  const double y = kRgbToXyz[1][0] * r + kRgbToXyz[1][1] * g + kRgbToXyz[1][2] * b;
  const double z = kRgbToXyz[2][0] * r + kRgbToXyz[2][1] * g + kRgbToXyz[2][2] * b;
  const double fx = lab_f(x / kWhiteX);
  const double fy = lab_f(y / kWhiteY);
  const double fz = lab_f(z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabColor gray_to_lab(std::uint8_t value) noexcept {
  return {rgb_to_lab({value, value, value}).L, 0.0, 0.0};
}

}  // namespace maskforge
