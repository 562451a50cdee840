#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "maskforge/geometry.hpp"

namespace maskforge {

/// Binary bitmap for one annotation class, row-major, (0,0) top-left.
/// Each cell holds 0 or 1.
class MaskLayer {
 public:
  MaskLayer() = default;
  MaskLayer(std::string class_name, int width, int height);

  const std::string& class_name() const noexcept { return class_name_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool get(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value = true) noexcept {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }

  std::span<std::uint8_t> bits() noexcept { return bits_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::uint8_t* row(int y) noexcept { return bits_.data() + static_cast<std::size_t>(y) * width_; }
  const std::uint8_t* row(int y) const noexcept {
    return bits_.data() + static_cast<std::size_t>(y) * width_;
  }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  void clear() noexcept;

  /// Copy of the pixels under `rect`, which must lie inside the layer.
  MaskLayer crop(const RoiRect& rect) const;
  /// Overwrite the area at (x0, y0) with `window`; `window` must fit.
  void paste(const MaskLayer& window, int x0, int y0);

  friend bool operator==(const MaskLayer& a, const MaskLayer& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.bits_ == b.bits_;
  }

 private:
  std::string class_name_;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// All class layers of one image. Every layer has the set's dimensions.
class MaskSet {
 public:
  MaskSet() = default;
  MaskSet(int width, int height) : width_(width), height_(height) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  /// Returns the layer for `class_name`, creating an all-zero one if absent.
  MaskLayer& layer(const std::string& class_name);
  const MaskLayer* find(const std::string& class_name) const;
  MaskLayer* find(const std::string& class_name);
  /// Throws dimension-mismatch when the layer size differs from the set.
  void insert(MaskLayer layer);

  const std::map<std::string, MaskLayer>& layers() const noexcept { return layers_; }
  std::size_t size() const noexcept { return layers_.size(); }

  friend bool operator==(const MaskSet&, const MaskSet&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::map<std::string, MaskLayer> layers_;
};

}  // namespace maskforge
