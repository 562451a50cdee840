#include <array>

#include "maskforge/kernels.hpp"

namespace maskforge::kernels {
namespace {

void prepare(const ImageRecord& image, LabImage& out) {
  out.width = image.width;
  out.height = image.height;
  const std::size_t n = image.pixel_count();
  out.L.assign(n, 0.0);
  out.a.assign(n, 0.0);
  out.b.assign(n, 0.0);
}

inline void convert_pixel(const ImageRecord& image, LabImage& out, std::size_t i,
                          const std::array<double, 256>& gray_l) {
  if (image.channels == 1) {
    out.L[i] = gray_l[image.pixels[i]];
    return;
  }
  const auto* p = image.pixels.data() + i * 3;
  const LabColor c = rgb_to_lab({p[0], p[1], p[2]});
  out.L[i] = c.L;
  out.a[i] = c.a;
  out.b[i] = c.b;
}

const std::array<double, 256>& gray_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int v = 0; v < 256; ++v) t[v] = gray_to_lab(static_cast<std::uint8_t>(v)).L;
    return t;
  }();
  return table;
}

}  // namespace

void to_lab_serial(const ImageRecord& image, LabImage& out) {
  prepare(image, out);
  const auto& gray = gray_table();
  const std::size_t n = image.pixel_count();
  for (std::size_t i = 0; i < n; ++i) convert_pixel(image, out, i, gray);
}

void to_lab_omp(const ImageRecord& image, LabImage& out) {
  prepare(image, out);
  const auto& gray = gray_table();
  const auto n = static_cast<std::ptrdiff_t>(image.pixel_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) convert_pixel(image, out, static_cast<std::size_t>(i), gray);
}

}  // namespace maskforge::kernels
