#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maskforge/geometry.hpp"
#include "maskforge/image.hpp"
#include "maskforge/mask.hpp"

namespace maskforge {

struct SlicParams {
  int k = 200;          // desired superpixel count
  double m = 10.0;      // compactness
  int iterations = 10;  // update rounds after the initial assignment

  friend bool operator==(const SlicParams&, const SlicParams&) = default;
};

struct SlicOptions {
  bool parallel = true;
  /// OpenMP thread count for the parallel kernels; 0 keeps the runtime default.
  int threads = 0;
  /// Fragments below this size are merged; defaults to floor(N / k) / 4.
  std::optional<int> min_region_size;
  /// Polled between rounds; returning true aborts with ErrorCode::superseded.
  std::function<bool()> cancelled;
};

struct SuperpixelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;  // row-major, values in [0, region_count)
  int region_count = 0;
  SlicParams params;
  std::string image_digest;
  /// Mean spatial seed displacement for each update round.
  std::vector<double> seed_movement;

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

/// Throws invalid-params when `params` is unusable for an image of `pixels` pixels.
void validate_slic_params(const SlicParams& params, std::size_t pixels);

/// Initial seed lattice: spacing ceil(sqrt(N / k)), seeds at lattice cell
/// centers in row-major order, truncated to k.
std::vector<Point2> slic_seed_lattice(int width, int height, int k);

SuperpixelMap compute_slic(const ImageRecord& image, const SlicParams& params,
                           const SlicOptions& options = {});

struct Relabeled {
  std::vector<int> labels;
  int region_count = 0;
};

/// Splits every label into its 4-connected fragments, merges fragments smaller
/// than `min_size` into the largest adjacent region, and renumbers regions in
/// row-major first-encounter order. Negative input labels are treated as one
/// more label value.
Relabeled enforce_connectivity(const std::vector<int>& labels, int width, int height,
                               int min_size);

/// ORs the region under `p` into `layer`. `current_digest` identifies the
/// image the caller is editing; a different digest means the map is stale.
void mark_superpixel(MaskLayer& layer, const SuperpixelMap& map, Point2 p,
                     const std::string& current_digest);

/// RGB copy of `image` with region boundaries painted in `color`.
ImageRecord render_boundaries(const ImageRecord& image, const SuperpixelMap& map,
                              Rgb color = {255, 255, 0});

}  // namespace maskforge
