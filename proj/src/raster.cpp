#include "maskforge/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "maskforge/error.hpp"

namespace maskforge::raster {
namespace {

void require_finite(Point2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    fail(ErrorCode::malformed_geometry, "non-finite coordinate");
  }
}

// Clamp a coordinate to a range that keeps every in-layer comparison intact
// and is safe to convert to int.
double clamp_coord(double v, int extent) {
  return std::clamp(v, -2.0, static_cast<double>(extent) + 2.0);
}

// Smallest pixel index i with i + 0.5 >= x.
int first_center_at_or_after(double x, int extent) {
  x = clamp_coord(x, extent);
  int i = static_cast<int>(std::ceil(x - 0.5));
  while (i - 1 + 0.5 >= x) --i;
  while (i + 0.5 < x) ++i;
  return i;
}

double segment_distance_sq(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len_sq = dx * dx + dy * dy;
  double cx = a.x;
  double cy = a.y;
  if (len_sq > 0.0) {
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    cx = a.x + t * dx;
    cy = a.y + t * dy;
  }
  const double ex = p.x - cx;
  const double ey = p.y - cy;
  return ex * ex + ey * ey;
}

template <typename Visit>
void for_each_stroke_pixel(const MaskLayer& layer, const Stroke& stroke, Visit&& visit) {
  if (stroke.points.empty()) return;
  if (!std::isfinite(stroke.radius) || stroke.radius < 0.0) {
    fail(ErrorCode::malformed_geometry, "brush radius must be finite and >= 0");
  }
  for (const Point2& p : stroke.points) require_finite(p);

  const double r = stroke.radius == 0.0 ? 0.5 : stroke.radius;
  const double r_sq = r * r;
  const std::size_t n = stroke.points.size();
  const std::size_t segments = n == 1 ? 1 : n - 1;
  for (std::size_t s = 0; s < segments; ++s) {
    const Point2 a = stroke.points[s];
    const Point2 b = stroke.points[n == 1 ? 0 : s + 1];
    const int x_lo = std::max(0, first_center_at_or_after(std::min(a.x, b.x) - r, layer.width()));
    const int y_lo = std::max(0, first_center_at_or_after(std::min(a.y, b.y) - r, layer.height()));
    const int x_hi = std::min(layer.width(),
                              first_center_at_or_after(std::max(a.x, b.x) + r, layer.width()) + 1);
    const int y_hi = std::min(layer.height(),
                              first_center_at_or_after(std::max(a.y, b.y) + r, layer.height()) + 1);
    for (int y = y_lo; y < y_hi; ++y) {
      for (int x = x_lo; x < x_hi; ++x) {
        if (segment_distance_sq({x + 0.5, y + 0.5}, a, b) <= r_sq) visit(x, y);
      }
    }
  }
}

}  // namespace

void fill_box(MaskLayer& layer, const RoiRect& rect) {
  const int x_lo = std::max(0, rect.x0);
  const int y_lo = std::max(0, rect.y0);
  const int x_hi = std::min(layer.width(), rect.x1());
  const int y_hi = std::min(layer.height(), rect.y1());
  for (int y = y_lo; y < y_hi; ++y) {
    std::fill(layer.row(y) + x_lo, layer.row(y) + std::max(x_lo, x_hi), 1);
  }
}

void fill_ellipse(MaskLayer& layer, Point2 center, double semi_x, double semi_y) {
  require_finite(center);
  if (!std::isfinite(semi_x) || !std::isfinite(semi_y) || semi_x < 0.0 || semi_y < 0.0) {
    fail(ErrorCode::malformed_geometry, "ellipse semi-axes must be finite and >= 0");
  }
  if (semi_x == 0.0 || semi_y == 0.0) {
    const double fx = std::floor(center.x);
    const double fy = std::floor(center.y);
    if (fx >= 0 && fy >= 0 && fx < layer.width() && fy < layer.height()) {
      layer.set(static_cast<int>(fx), static_cast<int>(fy));
    }
    return;
  }
  const int x_lo = std::max(0, first_center_at_or_after(center.x - semi_x, layer.width()) - 1);
  const int y_lo = std::max(0, first_center_at_or_after(center.y - semi_y, layer.height()) - 1);
  const int x_hi =
      std::min(layer.width(), first_center_at_or_after(center.x + semi_x, layer.width()) + 1);
  const int y_hi =
      std::min(layer.height(), first_center_at_or_after(center.y + semi_y, layer.height()) + 1);
  for (int y = y_lo; y < y_hi; ++y) {
    const double ny = (y + 0.5 - center.y) / semi_y;
    for (int x = x_lo; x < x_hi; ++x) {
      const double nx = (x + 0.5 - center.x) / semi_x;
      if (nx * nx + ny * ny <= 1.0) layer.set(x, y);
    }
  }
}

void fill_polygon(MaskLayer& layer, std::span<const Point2> vertices) {
  if (vertices.size() < 3) {
    fail(ErrorCode::too_few_vertices, "polygon needs at least 3 vertices");
  }
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (const Point2& v : vertices) {
    require_finite(v);
    y_min = std::min(y_min, v.y);
    y_max = std::max(y_max, v.y);
  }

  const int row_lo = std::max(0, first_center_at_or_after(y_min, layer.height()));
  const int row_hi = std::min(layer.height(), first_center_at_or_after(y_max, layer.height()) + 1);
  const std::size_t n = vertices.size();
  std::vector<double> crossings;
  crossings.reserve(n);

  for (int row = row_lo; row < row_hi; ++row) {
    const double y = row + 0.5;
    crossings.clear();
    for (std::size_t k = 0; k < n; ++k) {
      Point2 lo = vertices[k];
      Point2 hi = vertices[(k + 1) % n];
      if (lo.y == hi.y) continue;
      if (lo.y > hi.y) std::swap(lo, hi);
      if (lo.y <= y && y < hi.y) {
        crossings.push_back(lo.x + (y - lo.y) * (hi.x - lo.x) / (hi.y - lo.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int x_lo = std::max(0, first_center_at_or_after(crossings[k], layer.width()));
      const int x_hi =
          std::min(layer.width(), first_center_at_or_after(crossings[k + 1], layer.width()));
      if (x_lo < x_hi) std::fill(layer.row(row) + x_lo, layer.row(row) + x_hi, 1);
    }
  }
}

void fill_curve(MaskLayer& layer, std::span<const Point2> samples) {
  fill_polygon(layer, samples);
}

void paint_stroke(MaskLayer& layer, const Stroke& stroke) {
  for_each_stroke_pixel(layer, stroke, [&](int x, int y) { layer.set(x, y, true); });
}

void erase_stroke(MaskLayer& layer, const Stroke& stroke) {
  for_each_stroke_pixel(layer, stroke, [&](int x, int y) { layer.set(x, y, false); });
}

Components connected_components(const MaskLayer& layer) {
  Components out;
  out.width = layer.width();
  out.height = layer.height();
  out.labels.assign(layer.bits().size(), 0);

  std::vector<int> stack;
  for (int y = 0; y < layer.height(); ++y) {
    for (int x = 0; x < layer.width(); ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * out.width + x;
      if (!layer.get(x, y) || out.labels[idx] != 0) continue;
      const int label = ++out.count;
      out.labels[idx] = label;
      stack.assign(1, static_cast<int>(idx));
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cx = cur % out.width;
        const int cy = cur / out.width;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!layer.in_bounds(nx, ny) || !layer.get(nx, ny)) continue;
            int& slot = out.labels[static_cast<std::size_t>(ny) * out.width + nx];
            if (slot == 0) {
              slot = label;
              stack.push_back(ny * out.width + nx);
            }
          }
        }
      }
    }
  }
  return out;
}

void delete_mark(MaskLayer& layer, const RoiRect& rect) {
  const int x_lo = std::max(0, rect.x0);
  const int y_lo = std::max(0, rect.y0);
  const int x_hi = std::min(layer.width(), rect.x1());
  const int y_hi = std::min(layer.height(), rect.y1());
  if (x_lo >= x_hi || y_lo >= y_hi) return;

  const Components comps = connected_components(layer);
  std::vector<std::uint8_t> doomed(static_cast<std::size_t>(comps.count) + 1, 0);
  bool any = false;
  for (int y = y_lo; y < y_hi; ++y) {
    for (int x = x_lo; x < x_hi; ++x) {
      if (const int label = comps.at(x, y); label != 0) {
        doomed[label] = 1;
        any = true;
      }
    }
  }
  if (!any) return;
  auto bits = layer.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (doomed[comps.labels[i]]) bits[i] = 0;
  }
}

}  // namespace maskforge::raster
