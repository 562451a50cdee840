#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "maskforge/image.hpp"

namespace fixture {

inline maskforge::ImageRecord uniform(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> px;
  px.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int i = 0; i < w * h; ++i) {
    px.push_back(r);
    px.push_back(g);
    px.push_back(b);
  }
  return maskforge::make_image(w, h, 3, std::move(px));
}

/// Left half black, right half white.
inline maskforge::ImageRecord half_and_half(int w, int h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3, 0);
  for (int y = 0; y < h; ++y)
    for (int x = w / 2; x < w; ++x)
      for (int c = 0; c < 3; ++c) px[(static_cast<std::size_t>(y) * w + x) * 3 + c] = 255;
  return maskforge::make_image(w, h, 3, std::move(px));
}

/// A few flat color patches plus noise; gray or RGB.
inline maskforge::ImageRecord random_image(std::mt19937_64& rng, int w, int h, int channels) {
  std::uniform_int_distribution<int> byte(0, 255), noise(-12, 12);
  std::uniform_int_distribution<int> px_x(0, w - 1), px_y(0, h - 1);
  struct Patch {
    int x, y;
    std::uint8_t c[3];
  };
  std::vector<Patch> patches(4);
  for (auto& p : patches) {
    p.x = px_x(rng);
    p.y = px_y(rng);
    for (auto& c : p.c) c = static_cast<std::uint8_t>(byte(rng));
  }
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Patch* best = &patches[0];
      int best_d = 1 << 30;
      for (const auto& p : patches) {
        const int d = (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
        if (d < best_d) {
          best_d = d;
          best = &p;
        }
      }
      for (int c = 0; c < channels; ++c) {
        const int v = best->c[c] + noise(rng);
        px[(static_cast<std::size_t>(y) * w + x) * channels + c] =
            static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
      }
    }
  return maskforge::make_image(w, h, channels, std::move(px));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mf") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::permissions(path_, std::filesystem::perms::owner_all,
                                 std::filesystem::perm_options::add, ec);
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
