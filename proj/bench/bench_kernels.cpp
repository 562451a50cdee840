#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "maskforge/image.hpp"
#include "maskforge/kernels.hpp"
#include "maskforge/superpixel.hpp"

using namespace maskforge;
using namespace maskforge::kernels;

namespace {

ImageRecord noise_image(int w, int h) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(byte(rng));
  return make_image(w, h, 3, std::move(px));
}

std::vector<Seed> grid_seeds(const LabImage& lab, int k, double& step) {
  step = std::sqrt(static_cast<double>(lab.width) * lab.height / k);
  std::vector<Seed> seeds;
  for (const Point2& p : slic_seed_lattice(lab.width, lab.height, k)) {
    const std::size_t i = lab.index(static_cast<int>(p.x), static_cast<int>(p.y));
    seeds.push_back({lab.L[i], lab.a[i], lab.b[i], p.x, p.y});
  }
  return seeds;
}

void BM_ToLab(benchmark::State& state, bool parallel) {
  const int side = static_cast<int>(state.range(0));
  const auto img = noise_image(side, side);
  LabImage lab;
  for (auto _ : state) {
    parallel ? to_lab_omp(img, lab) : to_lab_serial(img, lab);
    benchmark::DoNotOptimize(lab.L.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

void BM_SlicAssign(benchmark::State& state, bool parallel) {
  const int side = static_cast<int>(state.range(0));
  LabImage lab;
  to_lab_serial(noise_image(side, side), lab);
  double step = 0;
  const auto seeds = grid_seeds(lab, 400, step);
  const AssignParams params{step, (10.0 / step) * (10.0 / step)};
  std::vector<int> labels(static_cast<std::size_t>(side) * side);
  for (auto _ : state) {
    parallel ? slic_assign_omp(lab, seeds, params, labels)
             : slic_assign_serial(lab, seeds, params, labels);
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

void BM_Overlay(benchmark::State& state, bool parallel) {
  const int side = static_cast<int>(state.range(0));
  const auto img = noise_image(side, side);
  std::vector<std::vector<std::uint8_t>> masks(3, std::vector<std::uint8_t>(img.pixel_count()));
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    for (std::size_t c = 0; c < masks.size(); ++c) masks[c][i] = (i / (c + 2)) % 2;
  const std::vector<OverlayLayer> layers{{masks[0], {230, 25, 75}, 0.5},
                                         {masks[1], {60, 180, 75}, 0.5},
                                         {masks[2], {0, 130, 200}, 0.3}};
  std::vector<std::uint8_t> out(img.pixel_count() * 3);
  for (auto _ : state) {
    parallel ? overlay_omp(img, layers, out) : overlay_serial(img, layers, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

void BM_ComputeSlic(benchmark::State& state, bool parallel) {
  const int side = static_cast<int>(state.range(0));
  const auto img = noise_image(side, side);
  SlicOptions options;
  options.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(compute_slic(img, {200, 10, 10}, options));
  state.SetItemsProcessed(state.iterations() * side * side);
}

}  // namespace

BENCHMARK_CAPTURE(BM_ToLab, serial, false)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_ToLab, omp, true)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_SlicAssign, serial, false)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_SlicAssign, omp, true)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Overlay, serial, false)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Overlay, omp, true)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_ComputeSlic, serial, false)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ComputeSlic, omp, true)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
