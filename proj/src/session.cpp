#include "maskforge/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "maskforge/error.hpp"
#include "maskforge/kernels.hpp"
#include "maskforge/raster.hpp"

namespace maskforge {
namespace {

Point2 shifted(Point2 p, int dx, int dy) { return {p.x + dx, p.y + dy}; }

std::vector<Point2> shifted(const std::vector<Point2>& points, int dx, int dy) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) out.push_back(shifted(p, dx, dy));
  return out;
}

RoiRect shifted(RoiRect r, int dx, int dy) { return {r.x0 + dx, r.y0 + dy, r.w, r.h}; }

Stroke shifted(const Stroke& s, int dx, int dy) { return {shifted(s.points, dx, dy), s.radius}; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Edit translate_edit(const Edit& edit, int dx, int dy) {
  return std::visit(
      Overloaded{
          [&](const BoxEdit& e) -> Edit { return BoxEdit{shifted(e.rect, dx, dy)}; },
          [&](const EllipseEdit& e) -> Edit {
            return EllipseEdit{shifted(e.center, dx, dy), e.semi_x, e.semi_y};
          },
          [&](const PolygonEdit& e) -> Edit { return PolygonEdit{shifted(e.vertices, dx, dy)}; },
          [&](const CurveEdit& e) -> Edit { return CurveEdit{shifted(e.samples, dx, dy)}; },
          [&](const PaintEdit& e) -> Edit { return PaintEdit{shifted(e.stroke, dx, dy)}; },
          [&](const EraseEdit& e) -> Edit { return EraseEdit{shifted(e.stroke, dx, dy)}; },
          [&](const DeleteMarkEdit& e) -> Edit { return DeleteMarkEdit{shifted(e.rect, dx, dy)}; },
          [&](const SuperpixelClick& e) -> Edit {
            return SuperpixelClick{shifted(e.point, dx, dy)};
          },
      },
      edit);
}

const std::vector<Rgb>& default_palette() {
  static const std::vector<Rgb> palette{
      {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
      {245, 130, 48}, {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
      {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {170, 110, 40},
  };
  return palette;
}

void ClassRegistry::add(const std::string& name) {
  if (name.empty()) fail(ErrorCode::empty_name, "class name must not be empty");
  if (contains(name)) fail(ErrorCode::duplicate_class_name, "class already exists: " + name);
  const auto& palette = default_palette();
  entries_.push_back({name, {palette[entries_.size() % palette.size()], 0.5}});
  if (entries_.size() == 1) active_ = 0;
}

void ClassRegistry::set_active(const std::string& name) {
  const auto idx = find(name);
  if (!idx) fail(ErrorCode::unknown_class, "unknown class: " + name);
  active_ = *idx;
}

void ClassRegistry::set_style(const std::string& name, const ClassStyle& style) {
  const auto idx = find(name);
  if (!idx) fail(ErrorCode::unknown_class, "unknown class: " + name);
  if (!std::isfinite(style.opacity) || style.opacity < 0.0 || style.opacity > 1.0) {
    fail(ErrorCode::invalid_params, "opacity must be in [0, 1]");
  }
  entries_[*idx].style = style;
}

std::optional<std::size_t> ClassRegistry::find(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

const std::string& ClassRegistry::active_name() const {
  if (entries_.empty()) fail(ErrorCode::unknown_class, "no classes registered");
  return entries_[active_].name;
}

Point2 to_global(const std::optional<RoiRect>& roi, Point2 p, int image_width, int image_height) {
  const double w = roi ? roi->w : image_width;
  const double h = roi ? roi->h : image_height;
  if (!(p.x >= 0.0 && p.y >= 0.0 && p.x < w && p.y < h)) {
    fail(ErrorCode::point_outside_frame, "point outside the editing frame");
  }
  return roi ? shifted(p, roi->x0, roi->y0) : p;
}

ImageRecord render_overlay(const ImageRecord& image, const MaskSet& masks,
                           const ClassRegistry& registry, bool parallel) {
  if (masks.width() != image.width || masks.height() != image.height) {
    fail(ErrorCode::dimension_mismatch, "mask set and image differ in size");
  }
  std::vector<kernels::OverlayLayer> layers;
  for (const auto& entry : registry.entries()) {
    if (const MaskLayer* layer = masks.find(entry.name)) {
      layers.push_back({layer->bits(), entry.style.color, entry.style.opacity});
    }
  }
  ImageRecord out{image.path, image.width, image.height, 3, {}};
  out.pixels.resize(image.pixel_count() * 3);
  if (parallel) {
    kernels::overlay_omp(image, layers, out.pixels);
  } else {
    kernels::overlay_serial(image, layers, out.pixels);
  }
  return out;
}

Session Session::open(const std::vector<fs::path>& sources,
                      const std::vector<std::string>& class_names, SessionOptions options) {
  Session s;
  std::error_code ec;
  for (const fs::path& p : sources) {
    if (!fs::exists(p, ec)) fail(ErrorCode::unreadable_directory, "cannot read " + p.string());
  }
  if (sources.size() == 1 && fs::is_directory(sources.front(), ec)) {
    s.images_ = list_images(sources.front());
  } else {
    for (const fs::path& p : sources) {
      if (fs::is_directory(p, ec)) {
        const auto more = list_images(p);
        s.images_.insert(s.images_.end(), more.begin(), more.end());
      } else if (fs::is_regular_file(p, ec) && is_supported_image(p) && !is_mask_file(p)) {
        s.images_.push_back(p);
      }
    }
    std::sort(s.images_.begin(), s.images_.end(), [](const fs::path& a, const fs::path& b) {
      return a.filename() < b.filename() || (a.filename() == b.filename() && a < b);
    });
  }
  if (s.images_.empty()) fail(ErrorCode::no_images_found, "no supported images found");

  std::set<std::string> stems;
  for (std::size_t i = 0; i < s.images_.size(); ++i) {
    if (!stems.insert(s.stem(i)).second) {
      fail(ErrorCode::duplicate_image_stem,
           "two images share the mask stem '" + s.stem(i) + "'");
    }
  }

  if (class_names.empty()) fail(ErrorCode::empty_name, "at least one class is required");
  for (const auto& name : class_names) s.add_class(name);

  s.mask_dir_ = options.mask_dir;
  s.checkpoint_dir_ = !options.checkpoint_dir.empty() ? options.checkpoint_dir
                      : !options.mask_dir.empty()     ? options.mask_dir
                                                      : s.images_.front().parent_path();
  if (const auto cp = read_checkpoint(s.checkpoint_dir_)) s.checkpoint_ = *cp;
  const auto names = s.image_filenames();
  s.current_ = resume(names, s.checkpoint_);
  s.load_current();
  return s;
}

std::vector<std::string> Session::image_filenames() const {
  std::vector<std::string> out;
  out.reserve(images_.size());
  for (const auto& p : images_) out.push_back(p.filename().string());
  return out;
}

std::string Session::stem(std::size_t index) const { return images_.at(index).stem().string(); }

fs::path Session::mask_dir_for(std::size_t index) const {
  return mask_dir_.empty() ? images_.at(index).parent_path() : mask_dir_;
}

void Session::add_class(const std::string& name) {
  if (!name.empty()) require_encodable_class_name(name);
  registry_.add(name);
}

void Session::set_active_class(const std::string& name) {
  registry_.set_active(name);
  masks_.layer(name);
}

void Session::set_class_style(const std::string& name, const ClassStyle& style) {
  registry_.set_style(name, style);
}

void Session::set_roi(const RoiRect& rect) {
  if (rect.w < 1 || rect.h < 1) fail(ErrorCode::zero_area_roi, "ROI must have positive area");
  if (!rect.inside(image_.width, image_.height)) {
    fail(ErrorCode::out_of_bounds_roi, "ROI extends outside the image");
  }
  roi_ = rect;
}

RoiRect Session::frame() const noexcept {
  return roi_ ? *roi_ : RoiRect{0, 0, image_.width, image_.height};
}

ImageRecord Session::view() const { return roi_ ? crop(image_, *roi_) : image_; }

EditResult Session::apply(const std::string& class_name, const Edit& edit,
                          const SuperpixelMap* superpixels) {
  if (!registry_.contains(class_name)) fail(ErrorCode::unknown_class, "unknown class: " + class_name);
  const RoiRect win = frame();
  const int dx = -win.x0;
  const int dy = -win.y0;
  MaskLayer& layer = masks_.layer(class_name);
  MaskLayer local = layer.crop(win);
  const MaskLayer before = local;

  std::visit(Overloaded{
                 [&](const BoxEdit& e) { raster::fill_box(local, shifted(e.rect, dx, dy)); },
                 [&](const EllipseEdit& e) {
                   raster::fill_ellipse(local, shifted(e.center, dx, dy), e.semi_x, e.semi_y);
                 },
                 [&](const PolygonEdit& e) {
                   raster::fill_polygon(local, shifted(e.vertices, dx, dy));
                 },
                 [&](const CurveEdit& e) { raster::fill_curve(local, shifted(e.samples, dx, dy)); },
                 [&](const PaintEdit& e) { raster::paint_stroke(local, shifted(e.stroke, dx, dy)); },
                 [&](const EraseEdit& e) { raster::erase_stroke(local, shifted(e.stroke, dx, dy)); },
                 [&](const DeleteMarkEdit& e) {
                   raster::delete_mark(local, shifted(e.rect, dx, dy));
                 },
                 [&](const SuperpixelClick& e) {
                   if (!superpixels) {
                     fail(ErrorCode::stale_superpixel_map, "no superpixel map computed");
                   }
                   const Point2 p = shifted(e.point, dx, dy);
                   if (!(p.x >= 0 && p.y >= 0 && p.x < win.w && p.y < win.h)) {
                     fail(ErrorCode::point_outside_frame, "click outside the editing frame");
                   }
                   mark_superpixel(local, *superpixels, p, image_digest(view()));
                 },
             },
             edit);

  EditResult result;
  int x_lo = win.w, y_lo = win.h, x_hi = -1, y_hi = -1;
  for (int y = 0; y < win.h; ++y) {
    for (int x = 0; x < win.w; ++x) {
      if (local.row(y)[x] == before.row(y)[x]) continue;
      ++result.changed_bits;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (result.changed_bits > 0) {
    result.changed_box = RoiRect{x_lo + win.x0, y_lo + win.y0, x_hi - x_lo + 1, y_hi - y_lo + 1};
    layer.paste(local, win.x0, win.y0);
    dirty_ = true;
  }
  return result;
}

std::size_t Session::navigate(int delta) {
  const auto last = static_cast<long long>(images_.size()) - 1;
  const auto target =
      static_cast<std::size_t>(std::clamp(static_cast<long long>(current_) + delta, 0LL, last));
  if (target == current_) return current_;

  const ImageRecord next_image = load_image(images_[target]);
  MaskSet next_masks = load_masks(stem(target), next_image.width, next_image.height,
                                  mask_dir_for(target));
  if (dirty_) {
    save_masks(stem(current_), masks_, mask_dir_for(current_));
    checkpoint_.add(images_[current_].filename().string());
    write_checkpoint(checkpoint_dir_, checkpoint_);
  }
  current_ = target;
  image_ = next_image;
  masks_ = std::move(next_masks);
  adopt_loaded_classes();
  roi_.reset();
  dirty_ = false;
  return current_;
}

std::vector<fs::path> Session::export_current() {
  auto written = save_masks(stem(current_), masks_, mask_dir_for(current_));
  checkpoint_.add(images_[current_].filename().string());
  write_checkpoint(checkpoint_dir_, checkpoint_);
  dirty_ = false;
  return written;
}

std::vector<fs::path> Session::flush() {
  if (!dirty_) return {};
  auto written = save_masks(stem(current_), masks_, mask_dir_for(current_));
  dirty_ = false;
  return written;
}

void Session::adopt_loaded_classes() {
  for (const auto& [name, layer] : masks_.layers()) {
    if (!registry_.contains(name)) registry_.add(name);
  }
}

void Session::load_current() {
  image_ = load_image(images_[current_]);
  masks_ = load_masks(stem(current_), image_.width, image_.height, mask_dir_for(current_));
  adopt_loaded_classes();
  roi_.reset();
  dirty_ = false;
}

}  // namespace maskforge
