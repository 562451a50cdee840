#include "maskforge/error.hpp"

namespace maskforge {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::no_images_found: return "no-images-found";
    case ErrorCode::duplicate_class_name: return "duplicate-class-name";
    case ErrorCode::empty_name: return "empty-name";
    case ErrorCode::unknown_class: return "unknown-class";
    case ErrorCode::unreadable_directory: return "unreadable-directory";
    case ErrorCode::duplicate_image_stem: return "duplicate-image-stem";
    case ErrorCode::out_of_bounds_roi: return "out-of-bounds-roi";
    case ErrorCode::zero_area_roi: return "zero-area-roi";
    case ErrorCode::point_outside_frame: return "point-outside-frame";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::too_few_vertices: return "too-few-vertices";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::point_outside_image: return "point-outside-image";
    case ErrorCode::stale_superpixel_map: return "stale-superpixel-map";
    case ErrorCode::unsupported_format: return "unsupported-format";
    case ErrorCode::corrupt_file: return "corrupt-file";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::unencodable_class_name: return "unencodable-class-name";
    case ErrorCode::corrupt_checkpoint: return "corrupt-checkpoint";
    case ErrorCode::unknown_session: return "unknown-session";
    case ErrorCode::malformed_geometry: return "malformed-geometry";
    case ErrorCode::superseded: return "superseded";
    case ErrorCode::bind_failure: return "bind-failure";
  }
  return "unknown";
}

}  // namespace maskforge
