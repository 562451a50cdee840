#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "maskforge/kernels.hpp"

namespace maskforge::kernels {

// Seed-centric reference: seeds visited in index order, a pixel switches only
// on a strictly smaller distance, so the lowest index wins ties.
void slic_assign_serial(const LabImage& lab, std::span<const Seed> seeds, AssignParams params,
                        std::span<int> labels) {
  const int w = lab.width;
  const int h = lab.height;
  std::vector<double> best(static_cast<std::size_t>(w) * h,
                           std::numeric_limits<double>::infinity());
  std::fill(labels.begin(), labels.end(), -1);
  const double half = params.step;

  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const Seed& s = seeds[k];
    const int x_lo = std::max(0, static_cast<int>(std::floor(s.x - half - 0.5)));
    const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(s.x + half - 0.5)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(s.y - half - 0.5)));
    const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(s.y + half - 0.5)));
    for (int y = y_lo; y <= y_hi; ++y) {
      const double py = y + 0.5;
      for (int x = x_lo; x <= x_hi; ++x) {
        const double px = x + 0.5;
        if (!in_window(s, px, py, half)) continue;
        const std::size_t i = lab.index(x, y);
        const double d =
            slic_distance_sq(s, lab.L[i], lab.a[i], lab.b[i], px, py, params.spatial_weight);
        if (d < best[i]) {
          best[i] = d;
          labels[i] = static_cast<int>(k);
        }
      }
    }
  }
}

// Pixel-centric: each pixel scans seeds bucketed in the 3x3 cells around it
// (cell size S), so rows are independent.
void slic_assign_omp(const LabImage& lab, std::span<const Seed> seeds, AssignParams params,
                     std::span<int> labels) {
  const int w = lab.width;
  const int h = lab.height;
  const double half = params.step;
  const int cells_x = static_cast<int>(std::floor(w / half)) + 1;
  const int cells_y = static_cast<int>(std::floor(h / half)) + 1;

  auto cell_of = [&](double v, int cells) {
    return std::clamp(static_cast<int>(std::floor(v / half)), 0, cells - 1);
  };

  // Bucketed seed indices, ascending within each cell.
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(cells_x) * cells_y);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const int cx = cell_of(seeds[k].x, cells_x);
    const int cy = cell_of(seeds[k].y, cells_y);
    buckets[static_cast<std::size_t>(cy) * cells_x + cx].push_back(static_cast<int>(k));
  }

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const double py = y + 0.5;
    const int cy = cell_of(py, cells_y);
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5;
      const int cx = cell_of(px, cells_x);
      const std::size_t i = lab.index(x, y);
      double best = std::numeric_limits<double>::infinity();
      int best_k = -1;
      for (int ny = std::max(0, cy - 1); ny <= std::min(cells_y - 1, cy + 1); ++ny) {
        for (int nx = std::max(0, cx - 1); nx <= std::min(cells_x - 1, cx + 1); ++nx) {
          for (int k : buckets[static_cast<std::size_t>(ny) * cells_x + nx]) {
            const Seed& s = seeds[static_cast<std::size_t>(k)];
            if (!in_window(s, px, py, half)) continue;
            const double d =
                slic_distance_sq(s, lab.L[i], lab.a[i], lab.b[i], px, py, params.spatial_weight);
            if (d < best || (d == best && k < best_k)) {
              best = d;
              best_k = k;
            }
          }
        }
      }
      labels[i] = best_k;
    }
  }
}

}  // namespace maskforge::kernels
