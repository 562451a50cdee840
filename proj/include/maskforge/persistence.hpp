#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maskforge/image.hpp"
#include "maskforge/mask.hpp"

namespace maskforge {

namespace fs = std::filesystem;

inline constexpr const char* kCheckpointFileName = ".maskeditor_checkpoint.json";
inline constexpr int kCheckpointVersion = 1;

/// JPG, PNG, BMP and TIFF by extension (case-insensitive).
bool is_supported_image(const fs::path& path);

/// Mask files share the PNG extension; this recognizes `*__mask.png`.
bool is_mask_file(const fs::path& path);
/// Superpixel label maps written by batch-slic: `*__labels.png`.
bool is_label_file(const fs::path& path);
std::string label_file_name(const std::string& image_stem);

/// Supported images other than mask and label files, directly inside `dir`, sorted by filename.
std::vector<fs::path> list_images(const fs::path& dir);

/// Decodes to 8-bit gray or RGB. 16-bit samples are scaled, alpha is dropped.
ImageRecord load_image(const fs::path& path);

std::vector<std::uint8_t> encode_png(const ImageRecord& image);
/// 16-bit single-channel PNG of `values` (width x height, row-major).
std::vector<std::uint8_t> encode_png16(std::span<const std::uint16_t> values, int width,
                                       int height);

/// Writes to a temporary sibling, fsyncs and renames over `target`.
void write_file_atomic(const fs::path& target, std::span<const std::uint8_t> bytes);

namespace detail {
/// Crash simulation: leaves a partially written temporary file behind and
/// throws io-failure before the rename, as if the process died mid-write.
void write_file_atomic_interrupted(const fs::path& target, std::span<const std::uint8_t> bytes,
                                   std::size_t bytes_before_crash);
}  // namespace detail

/// Class names must survive the `<stem>__<class>__mask.png` file name: no path
/// separators or control characters, no "__", no leading or trailing '_'.
bool is_encodable_class_name(const std::string& name);
void require_encodable_class_name(const std::string& name);

std::string mask_file_name(const std::string& image_stem, const std::string& class_name);
/// Splits a mask file name into (stem, class); nullopt when it does not match.
std::optional<std::pair<std::string, std::string>> parse_mask_file_name(const std::string& name);

/// One 0/255 grayscale PNG per class that has set bits or an existing file.
std::vector<fs::path> save_masks(const std::string& image_stem, const MaskSet& masks,
                                 const fs::path& out_dir);

/// Reads every mask file of `image_stem` in `dir`; pixels > 127 are set.
MaskSet load_masks(const std::string& image_stem, int width, int height, const fs::path& dir);

struct Checkpoint {
  int version = kCheckpointVersion;
  std::vector<std::string> completed;

  std::size_t completed_count() const noexcept { return completed.size(); }
  bool contains(const std::string& filename) const;
  /// Appends `filename` unless already present.
  void add(const std::string& filename);

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::string serialize_checkpoint(const Checkpoint& cp);
/// Throws corrupt-checkpoint on anything but a well-formed version-1 record.
Checkpoint parse_checkpoint(std::string_view text);

fs::path write_checkpoint(const fs::path& dir, const Checkpoint& cp);
std::optional<Checkpoint> read_checkpoint(const fs::path& dir);

/// Index of the first image not listed as completed; the last index when all
/// are; 0 without a checkpoint.
std::size_t resume(std::span<const std::string> image_filenames,
                   const std::optional<Checkpoint>& cp);

}  // namespace maskforge
