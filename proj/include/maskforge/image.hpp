#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maskforge/color.hpp"
#include "maskforge/geometry.hpp"

namespace maskforge {

/// Decoded 8-bit image: 1 channel (gray) or 3 (RGB), row-major, interleaved.
struct ImageRecord {
  std::string path;
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width + x) * channels;
  }
  Rgb rgb(int x, int y) const noexcept {
    const std::size_t i = index(x, y);
    if (channels == 1) return {pixels[i], pixels[i], pixels[i]};
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width) * height; }
};

/// Builds a validated record; throws dimension-mismatch on inconsistent sizes.
ImageRecord make_image(int width, int height, int channels, std::vector<std::uint8_t> pixels,
                       std::string path = {});

/// Sub-image under `rect` (must lie inside the image). The path is kept.
ImageRecord crop(const ImageRecord& image, const RoiRect& rect);

/// 64-bit FNV-1a over dimensions and pixels, as 16 hex digits.
std::string image_digest(const ImageRecord& image);

}  // namespace maskforge
