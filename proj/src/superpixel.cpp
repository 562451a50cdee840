#include "maskforge/superpixel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "maskforge/error.hpp"
#include "maskforge/kernels.hpp"

namespace maskforge {
namespace {

using kernels::LabImage;
using kernels::Seed;

double gradient_at(const LabImage& lab, int x, int y) {
  auto diff_sq = [&](std::size_t i, std::size_t j) {
    const double dl = lab.L[i] - lab.L[j];
    const double da = lab.a[i] - lab.a[j];
    const double db = lab.b[i] - lab.b[j];
    return dl * dl + da * da + db * db;
  };
  const int xl = std::max(0, x - 1);
  const int xr = std::min(lab.width - 1, x + 1);
  const int yu = std::max(0, y - 1);
  const int yd = std::min(lab.height - 1, y + 1);
  return diff_sq(lab.index(xr, y), lab.index(xl, y)) + diff_sq(lab.index(x, yd), lab.index(x, yu));
}

Seed seed_at(const LabImage& lab, double x, double y) {
  const int px = std::clamp(static_cast<int>(std::floor(x)), 0, lab.width - 1);
  const int py = std::clamp(static_cast<int>(std::floor(y)), 0, lab.height - 1);
  const std::size_t i = lab.index(px, py);
  return {lab.L[i], lab.a[i], lab.b[i], x, y};
}

// Moves each seed to the lowest-gradient pixel of the 3x3 neighborhood around
// the pixel containing it. A seed whose own pixel is already minimal keeps its
// exact position.
std::vector<Seed> initial_seeds(const LabImage& lab, int k) {
  std::vector<Seed> seeds;
  for (const Point2& p : slic_seed_lattice(lab.width, lab.height, k)) {
    const int px = std::clamp(static_cast<int>(std::floor(p.x)), 0, lab.width - 1);
    const int py = std::clamp(static_cast<int>(std::floor(p.y)), 0, lab.height - 1);
    double best = gradient_at(lab, px, py);
    int bx = px;
    int by = py;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = px + dx;
        const int ny = py + dy;
        if (nx < 0 || ny < 0 || nx >= lab.width || ny >= lab.height) continue;
        const double g = gradient_at(lab, nx, ny);
        if (g < best) {
          best = g;
          bx = nx;
          by = ny;
        }
      }
    }
    if (bx == px && by == py) {
      seeds.push_back(seed_at(lab, p.x, p.y));
    } else {
      seeds.push_back(seed_at(lab, bx + 0.5, by + 0.5));
    }
  }
  return seeds;
}

// Pixels outside every window fall back to the globally nearest seed.
void assign_orphans(const LabImage& lab, std::span<const Seed> seeds, double spatial_weight,
                    std::vector<int>& labels) {
  for (int y = 0; y < lab.height; ++y) {
    for (int x = 0; x < lab.width; ++x) {
      const std::size_t i = lab.index(x, y);
      if (labels[i] >= 0) continue;
      double best = std::numeric_limits<double>::infinity();
      int best_k = 0;
      for (std::size_t k = 0; k < seeds.size(); ++k) {
        const double d = kernels::slic_distance_sq(seeds[k], lab.L[i], lab.a[i], lab.b[i],
                                                   x + 0.5, y + 0.5, spatial_weight);
        if (d < best) {
          best = d;
          best_k = static_cast<int>(k);
        }
      }
      labels[i] = best_k;
    }
  }
}

// Recenters seeds on the mean (Lab, x, y) of their pixels, accumulated in
// row-major order. Returns the mean spatial displacement.
double update_seeds(const LabImage& lab, const std::vector<int>& labels, std::vector<Seed>& seeds) {
  struct Sum {
    double L = 0, a = 0, b = 0, x = 0, y = 0;
    std::size_t n = 0;
  };
  std::vector<Sum> sums(seeds.size());
  for (int y = 0; y < lab.height; ++y) {
    for (int x = 0; x < lab.width; ++x) {
      const std::size_t i = lab.index(x, y);
      Sum& s = sums[static_cast<std::size_t>(labels[i])];
      s.L += lab.L[i];
      s.a += lab.a[i];
      s.b += lab.b[i];
      s.x += x + 0.5;
      s.y += y + 0.5;
      ++s.n;
    }
  }
  double moved = 0.0;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const Sum& s = sums[k];
    if (s.n == 0) continue;
    const double n = static_cast<double>(s.n);
    const Seed next{s.L / n, s.a / n, s.b / n, s.x / n, s.y / n};
    moved += std::hypot(next.x - seeds[k].x, next.y - seeds[k].y);
    seeds[k] = next;
  }
  return seeds.empty() ? 0.0 : moved / static_cast<double>(seeds.size());
}

class ThreadCountGuard {
 public:
  explicit ThreadCountGuard(int threads) : previous_(omp_get_max_threads()), active_(threads > 0) {
    if (active_) omp_set_num_threads(threads);
  }
  ~ThreadCountGuard() {
    if (active_) omp_set_num_threads(previous_);
  }
  ThreadCountGuard(const ThreadCountGuard&) = delete;
  ThreadCountGuard& operator=(const ThreadCountGuard&) = delete;

 private:
  int previous_;
  bool active_;
};

}  // namespace

void validate_slic_params(const SlicParams& params, std::size_t pixels) {
  if (params.k < 1 || static_cast<std::size_t>(params.k) > pixels) {
    fail(ErrorCode::invalid_params, "k must be in [1, pixel count]");
  }
  if (!std::isfinite(params.m) || params.m <= 0.0) {
    fail(ErrorCode::invalid_params, "compactness m must be finite and > 0");
  }
  if (params.iterations < 0) fail(ErrorCode::invalid_params, "iterations must be >= 0");
}

std::vector<Point2> slic_seed_lattice(int width, int height, int k) {
  const double n = static_cast<double>(width) * height;
  const double spacing = std::ceil(std::sqrt(n / k));
  auto axis = [spacing](int extent) {
    std::vector<double> centers;
    for (int i = 0; (i + 0.5) * spacing < extent; ++i) centers.push_back((i + 0.5) * spacing);
    if (centers.empty()) centers.push_back(extent / 2.0);
    return centers;
  };
  const auto xs = axis(width);
  const auto ys = axis(height);
  std::vector<Point2> out;
  for (double y : ys) {
    for (double x : xs) {
      if (static_cast<int>(out.size()) == k) return out;
      out.push_back({x, y});
    }
  }
  return out;
}

SuperpixelMap compute_slic(const ImageRecord& image, const SlicParams& params,
                           const SlicOptions& options) {
  const std::size_t n = image.pixel_count();
  validate_slic_params(params, n);
  ThreadCountGuard guard(options.parallel ? options.threads : 0);

  LabImage lab;
  if (options.parallel) {
    kernels::to_lab_omp(image, lab);
  } else {
    kernels::to_lab_serial(image, lab);
  }

  const double step = std::sqrt(static_cast<double>(n) / params.k);
  const kernels::AssignParams assign{step, (params.m / step) * (params.m / step)};
  std::vector<Seed> seeds = initial_seeds(lab, params.k);
  std::vector<int> labels(n, -1);

  auto assign_all = [&] {
    if (options.parallel) {
      kernels::slic_assign_omp(lab, seeds, assign, labels);
    } else {
      kernels::slic_assign_serial(lab, seeds, assign, labels);
    }
    assign_orphans(lab, seeds, assign.spatial_weight, labels);
  };

  SuperpixelMap map;
  map.width = image.width;
  map.height = image.height;
  map.params = params;
  map.image_digest = image_digest(image);

  assign_all();
  for (int round = 0; round < params.iterations; ++round) {
    if (options.cancelled && options.cancelled()) {
      fail(ErrorCode::superseded, "superpixel computation superseded");
    }
    map.seed_movement.push_back(update_seeds(lab, labels, seeds));
    assign_all();
  }

  const int min_size = options.min_region_size.value_or(static_cast<int>(n / params.k) / 4);
  Relabeled relabeled = enforce_connectivity(labels, image.width, image.height, min_size);
  map.labels = std::move(relabeled.labels);
  map.region_count = relabeled.region_count;
  return map;
}

Relabeled enforce_connectivity(const std::vector<int>& labels, int width, int height,
                               int min_size) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  // Fragment ids in row-major first-encounter order.
  std::vector<int> frag(n, -1);
  std::vector<int> frag_size;
  std::vector<int> stack;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t start = static_cast<std::size_t>(y) * width + x;
      if (frag[start] >= 0) continue;
      const int id = static_cast<int>(frag_size.size());
      const int value = labels[start];
      int size = 0;
      frag[start] = id;
      stack.assign(1, static_cast<int>(start));
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        ++size;
        const int cx = cur % width;
        const int cy = cur / width;
        const int nbr[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
        for (const auto& q : nbr) {
          if (q[0] < 0 || q[1] < 0 || q[0] >= width || q[1] >= height) continue;
          const std::size_t j = static_cast<std::size_t>(q[1]) * width + q[0];
          if (frag[j] < 0 && labels[j] == value) {
            frag[j] = id;
            stack.push_back(static_cast<int>(j));
          }
        }
      }
      frag_size.push_back(size);
    }
  }

  const int frags = static_cast<int>(frag_size.size());
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(frags));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int f = frag[static_cast<std::size_t>(y) * width + x];
      if (x + 1 < width) {
        const int g = frag[static_cast<std::size_t>(y) * width + x + 1];
        if (g != f) {
          adjacency[f].push_back(g);
          adjacency[g].push_back(f);
        }
      }
      if (y + 1 < height) {
        const int g = frag[static_cast<std::size_t>(y + 1) * width + x];
        if (g != f) {
          adjacency[f].push_back(g);
          adjacency[g].push_back(f);
        }
      }
    }
  }
  for (auto& adj : adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }

  // Union-find over fragments; a root owns the merged size and adjacency.
  std::vector<int> parent(static_cast<std::size_t>(frags));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int f) {
    while (parent[f] != f) {
      parent[f] = parent[parent[f]];
      f = parent[f];
    }
    return f;
  };
  std::vector<int> size = frag_size;

  for (int f = 0; f < frags; ++f) {
    const int root = find(f);
    if (size[root] >= min_size) continue;
    int target = -1;
    for (int g : adjacency[root]) {
      const int r = find(g);
      if (r == root) continue;
      if (target < 0 || size[r] > size[target] || (size[r] == size[target] && r < target)) {
        target = r;
      }
    }
    if (target < 0) continue;
    parent[root] = target;
    size[target] += size[root];
    auto& into = adjacency[target];
    into.insert(into.end(), adjacency[root].begin(), adjacency[root].end());
    adjacency[root].clear();
    adjacency[root].shrink_to_fit();
    for (int& g : into) g = find(g);
    std::sort(into.begin(), into.end());
    into.erase(std::unique(into.begin(), into.end()), into.end());
    std::erase(into, target);
  }

  Relabeled out;
  out.labels.assign(n, 0);
  std::vector<int> compact(static_cast<std::size_t>(frags), -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int root = find(frag[i]);
    if (compact[root] < 0) compact[root] = out.region_count++;
    out.labels[i] = compact[root];
  }
  return out;
}

void mark_superpixel(MaskLayer& layer, const SuperpixelMap& map, Point2 p,
                     const std::string& current_digest) {
  if (map.image_digest != current_digest) {
    fail(ErrorCode::stale_superpixel_map, "superpixel map was computed for a different image");
  }
  if (layer.width() != map.width || layer.height() != map.height) {
    fail(ErrorCode::dimension_mismatch, "superpixel map and mask layer differ in size");
  }
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0 || p.y < 0 || p.x >= map.width ||
      p.y >= map.height) {
    fail(ErrorCode::point_outside_image, "click outside the image");
  }
  const int target = map.at(static_cast<int>(p.x), static_cast<int>(p.y));
  auto bits = layer.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (map.labels[i] == target) bits[i] = 1;
  }
}

ImageRecord render_boundaries(const ImageRecord& image, const SuperpixelMap& map, Rgb color) {
  if (image.width != map.width || image.height != map.height) {
    fail(ErrorCode::dimension_mismatch, "superpixel map and image differ in size");
  }
  ImageRecord out{image.path, image.width, image.height, 3, {}};
  out.pixels.resize(out.pixel_count() * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const int label = map.at(x, y);
      const bool edge = (x + 1 < map.width && map.at(x + 1, y) != label) ||
                        (y + 1 < map.height && map.at(x, y + 1) != label);
      const Rgb c = edge ? color : image.rgb(x, y);
      const std::size_t i = out.index(x, y);
      out.pixels[i] = c.r;
      out.pixels[i + 1] = c.g;
      out.pixels[i + 2] = c.b;
    }
  }
  return out;
}

}  // namespace maskforge
