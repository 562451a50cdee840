#pragma once

#include <span>
#include <vector>

#include "maskforge/geometry.hpp"
#include "maskforge/mask.hpp"

namespace maskforge::raster {

// Every tool samples pixel centers and clips to the layer. Fills and paint OR
// into the layer; erase and delete_mark only clear bits.

void fill_box(MaskLayer& layer, const RoiRect& rect);

/// Pixels whose center lies in the closed ellipse. A zero semi-axis marks the
/// single pixel containing `center`.
void fill_ellipse(MaskLayer& layer, Point2 center, double semi_x, double semi_y);

/// Even-odd scanline fill. An edge crosses row y when ymin <= y < ymax.
void fill_polygon(MaskLayer& layer, std::span<const Point2> vertices);

/// Freehand bounding curve, closed from the last sample back to the first.
void fill_curve(MaskLayer& layer, std::span<const Point2> samples);

/// Union of capsules around the polyline. Radius 0 is a one-pixel line
/// (centers within 0.5 of the polyline).
void paint_stroke(MaskLayer& layer, const Stroke& stroke);
void erase_stroke(MaskLayer& layer, const Stroke& stroke);

struct Components {
  int width = 0;
  int height = 0;
  int count = 0;
  /// 0 for unset pixels, 1..count in row-major first-encounter order.
  std::vector<int> labels;

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

/// 8-connected labeling of set bits.
Components connected_components(const MaskLayer& layer);

/// Clears every 8-connected component touching `rect`, in full.
void delete_mark(MaskLayer& layer, const RoiRect& rect);

}  // namespace maskforge::raster
