#pragma once

#include <cstdint>

namespace maskforge {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct LabColor {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// sRGB (8-bit, D65) to CIELAB.
LabColor rgb_to_lab(Rgb rgb) noexcept;

/// Gray level mapped to (L, 0, 0), where L is the lightness of (v, v, v).
LabColor gray_to_lab(std::uint8_t value) noexcept;

}  // namespace maskforge
