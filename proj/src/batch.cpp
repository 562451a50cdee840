#include "maskforge/batch.hpp"

#include <algorithm>
#include <map>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "maskforge/error.hpp"
#include "maskforge/persistence.hpp"

namespace maskforge {

BatchReport batch_slic(const fs::path& dir, const SlicParams& params, const fs::path& out_dir,
                       const SlicOptions& options) {
  BatchReport report;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io_failure, "cannot create " + out_dir.string());

  for (const fs::path& path : list_images(dir)) {
    try {
      const ImageRecord image = load_image(path);
      const SuperpixelMap map = compute_slic(image, params, options);
      if (map.region_count > 65536) {
        fail(ErrorCode::invalid_params, "more regions than a 16-bit label file can hold");
      }
      std::vector<std::uint16_t> values(map.labels.begin(), map.labels.end());
      const fs::path target = out_dir / label_file_name(path.stem().string());
      write_file_atomic(target, encode_png16(values, map.width, map.height));
      report.written.push_back(target);
    } catch (const Error& e) {
      report.failures.push_back(
          {path, std::string(error_code_name(e.code())) + ": " + e.what()});
    }
  }
  if (report.written.empty() && report.failures.empty()) {
    fail(ErrorCode::no_images_found, "no supported images in " + dir.string());
  }
  return report;
}

ValidationReport validate_directory(const fs::path& dir) {
  ValidationReport report;
  std::map<std::string, fs::path> images;
  for (const fs::path& p : list_images(dir)) images.emplace(p.stem().string(), p);

  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());

  std::map<std::string, cv::Size> image_sizes;
  for (const fs::path& path : entries) {
    const std::string name = path.filename().string();
    if (name.find(".tmp-") != std::string::npos) {
      report.warnings.push_back(name + ": leftover temporary file from an interrupted write");
      continue;
    }
    if (!is_mask_file(path)) continue;
    const auto parsed = parse_mask_file_name(name);
    if (!parsed) {
      report.errors.push_back(name + ": mask file name does not match <stem>__<class>__mask.png");
      continue;
    }
    ++report.masks_checked;
    const auto image = images.find(parsed->first);
    if (image == images.end()) {
      report.errors.push_back(name + ": no image with stem '" + parsed->first + "'");
      continue;
    }
    const cv::Mat mask = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mask.empty()) {
      report.errors.push_back(name + ": cannot decode");
      continue;
    }
    if (mask.type() != CV_8UC1) {
      report.errors.push_back(name + ": not an 8-bit single-channel image");
      continue;
    }
    if (!image_sizes.contains(parsed->first)) {
      try {
        const ImageRecord rec = load_image(image->second);
        image_sizes[parsed->first] = cv::Size(rec.width, rec.height);
      } catch (const Error& e) {
        report.errors.push_back(image->second.filename().string() + ": " + e.what());
        continue;
      }
    }
    if (mask.size() != image_sizes[parsed->first]) {
      report.errors.push_back(name + ": size differs from its image");
      continue;
    }
    const int non_binary = cv::countNonZero((mask != 0) & (mask != 255));
    if (non_binary > 0) {
      report.errors.push_back(name + ": " + std::to_string(non_binary) +
                              " pixel(s) are neither 0 nor 255");
    }
  }

  try {
    if (const auto cp = read_checkpoint(dir)) {
      for (const auto& done : cp->completed) {
        if (!images.contains(fs::path(done).stem().string())) {
          report.warnings.push_back("checkpoint lists '" + done + "', which is not in the folder");
        }
      }
    }
  } catch (const Error& e) {
    report.errors.push_back(std::string(kCheckpointFileName) + ": " + e.what());
  }
  return report;
}

}  // namespace maskforge
