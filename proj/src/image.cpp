#include "maskforge/image.hpp"

#include <algorithm>
#include <cstdio>

#include "maskforge/error.hpp"

namespace maskforge {

ImageRecord make_image(int width, int height, int channels, std::vector<std::uint8_t> pixels,
                       std::string path) {
  if (width < 1 || height < 1 || (channels != 1 && channels != 3) ||
      pixels.size() != static_cast<std::size_t>(width) * height * channels) {
    fail(ErrorCode::dimension_mismatch, "inconsistent image buffer");
  }
  return ImageRecord{std::move(path), width, height, channels, std::move(pixels)};
}

ImageRecord crop(const ImageRecord& image, const RoiRect& rect) {
  if (!rect.inside(image.width, image.height)) {
    fail(ErrorCode::out_of_bounds_roi, "crop rectangle outside image");
  }
  ImageRecord out{image.path, rect.w, rect.h, image.channels, {}};
  out.pixels.resize(out.pixel_count() * out.channels);
  const std::size_t row_bytes = static_cast<std::size_t>(rect.w) * image.channels;
  for (int y = 0; y < rect.h; ++y) {
    const auto* src = image.pixels.data() + image.index(rect.x0, rect.y0 + y);
    std::copy(src, src + row_bytes, out.pixels.data() + out.index(0, y));
  }
  return out;
}

std::string image_digest(const ImageRecord& image) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int v : {image.width, image.height, image.channels}) {
    for (int s = 0; s < 32; s += 8) mix(static_cast<std::uint8_t>(v >> s));
  }
  for (std::uint8_t p : image.pixels) mix(p);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace maskforge
