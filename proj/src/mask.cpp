#include "maskforge/mask.hpp"

#include <algorithm>
#include <numeric>

#include "maskforge/error.hpp"

namespace maskforge {

MaskLayer::MaskLayer(std::string class_name, int width, int height)
    : class_name_(std::move(class_name)), width_(width), height_(height) {
  if (width < 0 || height < 0) fail(ErrorCode::dimension_mismatch, "negative mask dimensions");
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t MaskLayer::count() const noexcept {
  return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

void MaskLayer::clear() noexcept { std::fill(bits_.begin(), bits_.end(), 0); }

MaskLayer MaskLayer::crop(const RoiRect& rect) const {
  if (!rect.inside(width_, height_)) fail(ErrorCode::out_of_bounds_roi, "crop outside layer");
  MaskLayer out(class_name_, rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y) {
    const std::uint8_t* src = row(rect.y0 + y) + rect.x0;
    std::copy(src, src + rect.w, out.row(y));
  }
  return out;
}

void MaskLayer::paste(const MaskLayer& window, int x0, int y0) {
  const RoiRect target{x0, y0, window.width(), window.height()};
  if (!target.inside(width_, height_)) fail(ErrorCode::out_of_bounds_roi, "paste outside layer");
  for (int y = 0; y < window.height(); ++y) {
    std::copy(window.row(y), window.row(y) + window.width(), row(y0 + y) + x0);
  }
}

MaskLayer& MaskSet::layer(const std::string& class_name) {
  auto it = layers_.find(class_name);
  if (it == layers_.end()) {
    it = layers_.emplace(class_name, MaskLayer(class_name, width_, height_)).first;
  }
  return it->second;
}

const MaskLayer* MaskSet::find(const std::string& class_name) const {
  auto it = layers_.find(class_name);
  return it == layers_.end() ? nullptr : &it->second;
}

MaskLayer* MaskSet::find(const std::string& class_name) {
  auto it = layers_.find(class_name);
  return it == layers_.end() ? nullptr : &it->second;
}

void MaskSet::insert(MaskLayer layer) {
  if (layer.width() != width_ || layer.height() != height_) {
    fail(ErrorCode::dimension_mismatch,
         "layer '" + layer.class_name() + "' is " + std::to_string(layer.width()) + "x" +
             std::to_string(layer.height()) + ", expected " + std::to_string(width_) + "x" +
             std::to_string(height_));
  }
  std::string key = layer.class_name();
  layers_.insert_or_assign(std::move(key), std::move(layer));
}

}  // namespace maskforge
