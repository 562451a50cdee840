#pragma once

#include <vector>

namespace maskforge {

/// Continuous image coordinates. Pixel (i, j) covers [i, i+1) x [j, j+1);
/// its center is (i + 0.5, j + 0.5).
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Integer pixel rectangle: [x0, x0 + w) x [y0, y0 + h).
struct RoiRect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  int x1() const noexcept { return x0 + w; }
  int y1() const noexcept { return y0 + h; }
  bool contains(int x, int y) const noexcept {
    return x >= x0 && x < x1() && y >= y0 && y < y1();
  }
  bool inside(int width, int height) const noexcept {
    return w >= 1 && h >= 1 && x0 >= 0 && y0 >= 0 && x1() <= width && y1() <= height;
  }

  friend bool operator==(const RoiRect&, const RoiRect&) = default;
};

struct Stroke {
  std::vector<Point2> points;
  double radius = 0.0;
};

}  // namespace maskforge
