#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "maskforge/color.hpp"
#include "maskforge/geometry.hpp"
#include "maskforge/image.hpp"
#include "maskforge/mask.hpp"
#include "maskforge/persistence.hpp"
#include "maskforge/superpixel.hpp"

namespace maskforge {

struct ClassStyle {
  Rgb color;
  double opacity = 0.5;
};

/// Fixed 12-color cycle assigned to classes in registration order.
const std::vector<Rgb>& default_palette();

class ClassRegistry {
 public:
  struct Entry {
    std::string name;
    ClassStyle style;
  };

  /// Appends `name` with the next palette color. The first class becomes active.
  void add(const std::string& name);
  void set_active(const std::string& name);
  void set_style(const std::string& name, const ClassStyle& style);

  std::optional<std::size_t> find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name).has_value(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t active_index() const noexcept { return active_; }
  const std::string& active_name() const;
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
  std::size_t active_ = 0;
};

/// Maps a frame-local point to full-image coordinates. The point must lie in
/// the ROI, or in the image when no ROI is set.
Point2 to_global(const std::optional<RoiRect>& roi, Point2 p, int image_width, int image_height);

/// Blends every class layer over the image in registry order:
/// out = (1 - opacity) * under + opacity * color, rounded half away from zero.
ImageRecord render_overlay(const ImageRecord& image, const MaskSet& masks,
                           const ClassRegistry& registry, bool parallel = true);

// Marking tools, with geometry in full-image coordinates.
struct BoxEdit { RoiRect rect; };
struct EllipseEdit { Point2 center; double semi_x = 0; double semi_y = 0; };
struct PolygonEdit { std::vector<Point2> vertices; };
struct CurveEdit { std::vector<Point2> samples; };
struct PaintEdit { Stroke stroke; };
struct EraseEdit { Stroke stroke; };
struct DeleteMarkEdit { RoiRect rect; };
struct SuperpixelClick { Point2 point; };

using Edit = std::variant<BoxEdit, EllipseEdit, PolygonEdit, CurveEdit, PaintEdit, EraseEdit,
                          DeleteMarkEdit, SuperpixelClick>;

/// Same edit with every coordinate offset by (dx, dy).
Edit translate_edit(const Edit& edit, int dx, int dy);

struct EditResult {
  std::size_t changed_bits = 0;
  std::optional<RoiRect> changed_box;  // full-image coordinates
};

struct SessionOptions {
  /// Where mask files live; empty means beside each image.
  fs::path mask_dir;
  /// Where the checkpoint lives; empty means mask_dir, else the first image's folder.
  fs::path checkpoint_dir;
};

/// Single-writer annotation state machine over an ordered list of images.
class Session {
 public:
  /// `sources` is one directory or a list of image files.
  static Session open(const std::vector<fs::path>& sources,
                      const std::vector<std::string>& class_names, SessionOptions options = {});

  const std::vector<fs::path>& images() const noexcept { return images_; }
  std::vector<std::string> image_filenames() const;
  std::size_t current() const noexcept { return current_; }
  const ImageRecord& image() const noexcept { return image_; }
  std::string stem(std::size_t index) const;
  fs::path mask_dir_for(std::size_t index) const;
  const fs::path& checkpoint_dir() const noexcept { return checkpoint_dir_; }
  const Checkpoint& checkpoint() const noexcept { return checkpoint_; }

  const ClassRegistry& registry() const noexcept { return registry_; }
  void add_class(const std::string& name);
  void set_active_class(const std::string& name);
  void set_class_style(const std::string& name, const ClassStyle& style);

  void set_roi(const RoiRect& rect);
  void clear_roi() noexcept { roi_.reset(); }
  const std::optional<RoiRect>& roi() const noexcept { return roi_; }
  /// The editable window: the ROI, or the whole image.
  RoiRect frame() const noexcept;
  /// Pixels of the editable window.
  ImageRecord view() const;

  const MaskSet& masks() const noexcept { return masks_; }
  bool dirty() const noexcept { return dirty_; }

  /// Applies a tool to `class_name`'s layer, clipped to the current frame.
  /// A superpixel click needs a map computed on view().
  EditResult apply(const std::string& class_name, const Edit& edit,
                   const SuperpixelMap* superpixels = nullptr);

  /// Moves by -1/+1 with clamping. A dirty outgoing image is saved and
  /// recorded as completed first; the new image's mask files are loaded.
  std::size_t navigate(int delta);

  /// Saves all masks of the current image and records it as completed.
  std::vector<fs::path> export_current();
  /// Saves dirty masks without touching completion (used on shutdown).
  std::vector<fs::path> flush();

 private:
  Session() = default;
  void load_current();
  /// Registers classes that only exist as mask files on disk.
  void adopt_loaded_classes();

  std::vector<fs::path> images_;
  std::size_t current_ = 0;
  ImageRecord image_;
  ClassRegistry registry_;
  MaskSet masks_;
  std::optional<RoiRect> roi_;
  bool dirty_ = false;
  fs::path mask_dir_;
  fs::path checkpoint_dir_;
  Checkpoint checkpoint_;
};

}  // namespace maskforge
