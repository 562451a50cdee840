#include "maskforge/kernels.hpp"

namespace maskforge::kernels {
namespace {

inline void composite_pixel(const ImageRecord& image, std::span<const OverlayLayer> layers,
                            std::size_t i, std::uint8_t* dst) {
  if (image.channels == 1) {
    dst[0] = dst[1] = dst[2] = image.pixels[i];
  } else {
    dst[0] = image.pixels[i * 3];
    dst[1] = image.pixels[i * 3 + 1];
    dst[2] = image.pixels[i * 3 + 2];
  }
  for (const OverlayLayer& layer : layers) {
    if (!layer.bits[i]) continue;
    dst[0] = blend_channel(dst[0], layer.color.r, layer.opacity);
    dst[1] = blend_channel(dst[1], layer.color.g, layer.opacity);
    dst[2] = blend_channel(dst[2], layer.color.b, layer.opacity);
  }
}

}  // namespace

void overlay_serial(const ImageRecord& image, std::span<const OverlayLayer> layers,
                    std::span<std::uint8_t> out) {
  const std::size_t n = image.pixel_count();
  for (std::size_t i = 0; i < n; ++i) composite_pixel(image, layers, i, out.data() + i * 3);
}

void overlay_omp(const ImageRecord& image, std::span<const OverlayLayer> layers,
                 std::span<std::uint8_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(image.pixel_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    composite_pixel(image, layers, u, out.data() + u * 3);
  }
}

}  // namespace maskforge::kernels
