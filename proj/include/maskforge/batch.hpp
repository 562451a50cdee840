#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "maskforge/superpixel.hpp"

namespace maskforge {

namespace fs = std::filesystem;

struct BatchFailure {
  fs::path path;
  std::string message;
};

struct BatchReport {
  std::vector<fs::path> written;
  std::vector<BatchFailure> failures;
  bool ok() const noexcept { return failures.empty(); }
};

/// Writes `<stem>__labels.png` (16-bit gray, one value per region) for every
/// image in `dir`. A failing image is reported and the rest still processed.
BatchReport batch_slic(const fs::path& dir, const SlicParams& params, const fs::path& out_dir,
                       const SlicOptions& options = {});

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::size_t masks_checked = 0;
  bool ok() const noexcept { return errors.empty(); }
};

/// Checks mask files (decodable, 8-bit gray, only 0/255, sized like their
/// image) and the checkpoint in `dir`.
ValidationReport validate_directory(const fs::path& dir);

}  // namespace maskforge
