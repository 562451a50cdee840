#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// variant; both produce bit-identical output for the same input.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "maskforge/color.hpp"
#include "maskforge/image.hpp"

namespace maskforge::kernels {

/// Planar CIELAB image.
struct LabImage {
  int width = 0;
  int height = 0;
  std::vector<double> L, a, b;

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width + x;
  }
};

struct Seed {
  double L = 0.0, a = 0.0, b = 0.0;
  double x = 0.0, y = 0.0;
};

/// Squared SLIC distance: d_c^2 + d_s^2 * spatial_weight, where
/// spatial_weight = (m / S)^2. Ordering is the same as for D itself.
inline double slic_distance_sq(const Seed& s, double L, double a, double b, double px, double py,
                               double spatial_weight) noexcept {
  const double dl = L - s.L;
  const double da = a - s.a;
  const double db = b - s.b;
  const double dx = px - s.x;
  const double dy = py - s.y;
  return (dl * dl + da * da + db * db) + (dx * dx + dy * dy) * spatial_weight;
}

/// Pixel center (px, py) is in the seed's search window.
inline bool in_window(const Seed& s, double px, double py, double half) noexcept {
  return std::abs(px - s.x) <= half && std::abs(py - s.y) <= half;
}

struct AssignParams {
  double step = 1.0;            // S; the window is 2S x 2S around the seed
  double spatial_weight = 1.0;  // (m / S)^2
};

// Lab conversion (gray images map to (L, 0, 0)).
void to_lab_serial(const ImageRecord& image, LabImage& out);
void to_lab_omp(const ImageRecord& image, LabImage& out);

// Windowed SLIC assignment. Each pixel gets the seed of minimum distance among
// the seeds whose window covers it, lowest seed index on ties; -1 when no
// window covers it. `labels` has one entry per pixel.
void slic_assign_serial(const LabImage& lab, std::span<const Seed> seeds, AssignParams params,
                        std::span<int> labels);
void slic_assign_omp(const LabImage& lab, std::span<const Seed> seeds, AssignParams params,
                     std::span<int> labels);

struct OverlayLayer {
  std::span<const std::uint8_t> bits;
  Rgb color;
  double opacity = 1.0;
};

inline std::uint8_t blend_channel(std::uint8_t under, std::uint8_t over, double alpha) noexcept {
  const double v = (1.0 - alpha) * under + alpha * over;
  const long r = std::lround(v);
  return static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
}

// Composites layers in order over the image. `out` is RGB, 3 bytes per pixel.
void overlay_serial(const ImageRecord& image, std::span<const OverlayLayer> layers,
                    std::span<std::uint8_t> out);
void overlay_omp(const ImageRecord& image, std::span<const OverlayLayer> layers,
                 std::span<std::uint8_t> out);

}  // namespace maskforge::kernels
