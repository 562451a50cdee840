#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maskforge {

enum class ErrorCode {
  no_images_found,
  duplicate_class_name,
  empty_name,
  unknown_class,
  unreadable_directory,
  duplicate_image_stem,
  out_of_bounds_roi,
  zero_area_roi,
  point_outside_frame,
  dimension_mismatch,
  too_few_vertices,
  invalid_params,
  point_outside_image,
  stale_superpixel_map,
  unsupported_format,
  corrupt_file,
  not_found,
  io_failure,
  unencodable_class_name,
  corrupt_checkpoint,
  unknown_session,
  malformed_geometry,
  superseded,
  bind_failure,
};

/// Kebab-case identifier used on the wire and in CLI diagnostics.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace maskforge
