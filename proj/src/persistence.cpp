#include "maskforge/persistence.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "json.hpp"
#include "maskforge/error.hpp"

namespace maskforge {
namespace {

constexpr std::string_view kMaskSuffix = "__mask.png";
constexpr std::string_view kSeparator = "__";
constexpr std::string_view kLabelSuffix = "__labels.png";

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

fs::path temp_sibling(const fs::path& target) {
  static std::atomic<unsigned> counter{0};
  return target.parent_path() / (target.filename().string() + ".tmp-" +
                                 std::to_string(::getpid()) + "-" + std::to_string(counter++));
}

void write_all(int fd, const std::uint8_t* data, std::size_t size, const fs::path& path) {
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::io_failure, "write failed: " + path.string());
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

int open_temp(const fs::path& tmp) {
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorCode::io_failure, "cannot create " + tmp.string());
  return fd;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_failure, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

cv::Mat decode(const fs::path& path, int flags) {
  const auto bytes = read_file(path);
  if (bytes.empty()) return {};
  try {
    return cv::imdecode(bytes, flags);
  } catch (const cv::Exception&) {
    return {};
  }
}

}  // namespace

bool is_supported_image(const fs::path& path) {
  static const std::set<std::string> kExtensions{".jpg", ".jpeg", ".png", ".bmp", ".tif", ".tiff"};
  return kExtensions.contains(lower_extension(path));
}

bool is_mask_file(const fs::path& path) {
  return path.filename().string().ends_with(kMaskSuffix);
}

bool is_label_file(const fs::path& path) {
  return path.filename().string().ends_with(kLabelSuffix);
}

std::string label_file_name(const std::string& image_stem) {
  return image_stem + std::string(kLabelSuffix);
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) fail(ErrorCode::unreadable_directory, "cannot read directory " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    if (is_supported_image(entry.path()) && !is_mask_file(entry.path()) &&
        !is_label_file(entry.path())) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename() < b.filename() || (a.filename() == b.filename() && a < b);
  });
  return out;
}

ImageRecord load_image(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) fail(ErrorCode::not_found, "no such image: " + path.string());
  if (!is_supported_image(path)) {
    fail(ErrorCode::unsupported_format, "unsupported image format: " + path.string());
  }
  cv::Mat mat = decode(path, cv::IMREAD_UNCHANGED);
  if (mat.empty()) fail(ErrorCode::corrupt_file, "cannot decode " + path.string());

  switch (mat.depth()) {
    case CV_8U:
      break;
    case CV_16U:
      mat.convertTo(mat, CV_8U, 1.0 / 257.0);
      break;
    case CV_32F:
    case CV_64F:
      mat.convertTo(mat, CV_8U, 255.0);
      break;
    default:
      fail(ErrorCode::unsupported_format, "unsupported sample type in " + path.string());
  }

  cv::Mat out;
  switch (mat.channels()) {
    case 1:
      out = mat;
      break;
    case 2:
      cv::extractChannel(mat, out, 0);
      break;
    case 3:
      cv::cvtColor(mat, out, cv::COLOR_BGR2RGB);
      break;
    case 4:
      cv::cvtColor(mat, out, cv::COLOR_BGRA2RGB);
      break;
    default:
      fail(ErrorCode::unsupported_format, "unsupported channel count in " + path.string());
  }
  if (!out.isContinuous()) out = out.clone();
  std::vector<std::uint8_t> pixels(out.datastart, out.dataend);
  return make_image(out.cols, out.rows, out.channels(), std::move(pixels), path.string());
}

std::vector<std::uint8_t> encode_png(const ImageRecord& image) {
  cv::Mat mat(image.height, image.width, image.channels == 1 ? CV_8UC1 : CV_8UC3,
              const_cast<std::uint8_t*>(image.pixels.data()));
  cv::Mat bgr;
  if (image.channels == 3) {
    cv::cvtColor(mat, bgr, cv::COLOR_RGB2BGR);
  } else {
    bgr = mat;
  }
  std::vector<std::uint8_t> bytes;
  if (!cv::imencode(".png", bgr, bytes)) fail(ErrorCode::io_failure, "PNG encoding failed");
  return bytes;
}

std::vector<std::uint8_t> encode_png16(std::span<const std::uint16_t> values, int width,
                                       int height) {
  if (values.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::dimension_mismatch, "label buffer size mismatch");
  }
  cv::Mat mat(height, width, CV_16UC1, const_cast<std::uint16_t*>(values.data()));
  std::vector<std::uint8_t> bytes;
  if (!cv::imencode(".png", mat, bytes)) fail(ErrorCode::io_failure, "PNG encoding failed");
  return bytes;
}

void write_file_atomic(const fs::path& target, std::span<const std::uint8_t> bytes) {
  const fs::path tmp = temp_sibling(target);
  const int fd = open_temp(tmp);
  try {
    write_all(fd, bytes.data(), bytes.size(), tmp);
    if (::fsync(fd) != 0) fail(ErrorCode::io_failure, "fsync failed: " + tmp.string());
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), target.c_str()) != 0) {
    ::unlink(tmp.c_str());
    fail(ErrorCode::io_failure, "cannot rename onto " + target.string());
  }
}

namespace detail {
void write_file_atomic_interrupted(const fs::path& target, std::span<const std::uint8_t> bytes,
                                   std::size_t bytes_before_crash) {
  const fs::path tmp = temp_sibling(target);
  const int fd = open_temp(tmp);
  write_all(fd, bytes.data(), std::min(bytes_before_crash, bytes.size()), tmp);
  ::close(fd);
  fail(ErrorCode::io_failure, "simulated crash while writing " + target.string());
}
}  // namespace detail

bool is_encodable_class_name(const std::string& name) {
  if (name.empty() || name == "." || name == "..") return false;
  if (name.front() == '_' || name.back() == '_') return false;
  if (name.find(kSeparator) != std::string::npos) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return c == '/' || c == '\\' || u < 0x20 || u == 0x7f;
  });
}

void require_encodable_class_name(const std::string& name) {
  if (!is_encodable_class_name(name)) {
    fail(ErrorCode::unencodable_class_name, "class name cannot be used in a file name: '" + name + "'");
  }
}

std::string mask_file_name(const std::string& image_stem, const std::string& class_name) {
  return image_stem + std::string(kSeparator) + class_name + std::string(kMaskSuffix);
}

// The class never contains "__" nor starts with '_', so the last "__" before
// the suffix separates stem from class.
std::optional<std::pair<std::string, std::string>> parse_mask_file_name(const std::string& name) {
  if (!name.ends_with(kMaskSuffix)) return std::nullopt;
  const std::string head = name.substr(0, name.size() - kMaskSuffix.size());
  const auto sep = head.rfind(kSeparator);
  if (sep == std::string::npos || sep == 0) return std::nullopt;
  std::string stem = head.substr(0, sep);
  std::string cls = head.substr(sep + kSeparator.size());
  if (!is_encodable_class_name(cls)) return std::nullopt;
  return std::make_pair(std::move(stem), std::move(cls));
}

std::vector<fs::path> save_masks(const std::string& image_stem, const MaskSet& masks,
                                 const fs::path& out_dir) {
  for (const auto& [name, layer] : masks.layers()) require_encodable_class_name(name);
  std::vector<fs::path> written;
  for (const auto& [name, layer] : masks.layers()) {
    const fs::path target = out_dir / mask_file_name(image_stem, name);
    std::error_code ec;
    if (layer.empty() && !fs::exists(target, ec)) continue;
    ImageRecord gray{target.string(), layer.width(), layer.height(), 1, {}};
    gray.pixels.resize(layer.bits().size());
    std::transform(layer.bits().begin(), layer.bits().end(), gray.pixels.begin(),
                   [](std::uint8_t b) { return b ? std::uint8_t{255} : std::uint8_t{0}; });
    write_file_atomic(target, encode_png(gray));
    written.push_back(target);
  }
  return written;
}

MaskSet load_masks(const std::string& image_stem, int width, int height, const fs::path& dir) {
  MaskSet set(width, height);
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) return set;
  std::vector<std::pair<std::string, fs::path>> found;
  for (const auto& entry : it) {
    const auto parsed = parse_mask_file_name(entry.path().filename().string());
    if (parsed && parsed->first == image_stem) found.emplace_back(parsed->second, entry.path());
  }
  std::sort(found.begin(), found.end());
  for (const auto& [cls, path] : found) {
    cv::Mat mat = decode(path, cv::IMREAD_GRAYSCALE);
    if (mat.empty()) fail(ErrorCode::corrupt_file, "cannot decode mask " + path.string());
    if (mat.cols != width || mat.rows != height) {
      fail(ErrorCode::dimension_mismatch,
           "mask " + path.string() + " is " + std::to_string(mat.cols) + "x" +
               std::to_string(mat.rows) + ", image is " + std::to_string(width) + "x" +
               std::to_string(height));
    }
    MaskLayer layer(cls, width, height);
    for (int y = 0; y < height; ++y) {
      const auto* src = mat.ptr<std::uint8_t>(y);
      for (int x = 0; x < width; ++x) layer.row(y)[x] = src[x] > 127 ? 1 : 0;
    }
    set.insert(std::move(layer));
  }
  return set;
}

bool Checkpoint::contains(const std::string& filename) const {
  return std::find(completed.begin(), completed.end(), filename) != completed.end();
}

void Checkpoint::add(const std::string& filename) {
  if (!contains(filename)) completed.push_back(filename);
}

std::string serialize_checkpoint(const Checkpoint& cp) {
  nlohmann::ordered_json j;
  j["version"] = cp.version;
  j["completed_count"] = cp.completed_count();
  j["completed"] = cp.completed;
  return j.dump(2);
}

Checkpoint parse_checkpoint(std::string_view text) {
  auto corrupt = [](const std::string& why) { fail(ErrorCode::corrupt_checkpoint, why); };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) corrupt("checkpoint must be an object");
  const auto version = j.find("version");
  const auto count = j.find("completed_count");
  const auto list = j.find("completed");
  if (version == j.end() || !version->is_number_integer() || *version != kCheckpointVersion) {
    corrupt("unsupported checkpoint version");
  }
  if (count == j.end() || !count->is_number_integer() || count->get<long long>() < 0) {
    corrupt("completed_count must be a non-negative integer");
  }
  if (list == j.end() || !list->is_array()) corrupt("completed must be an array");

  Checkpoint cp;
  std::set<std::string> seen;
  for (const auto& item : *list) {
    if (!item.is_string()) corrupt("completed entries must be strings");
    const auto name = item.get<std::string>();
    if (!seen.insert(name).second) corrupt("duplicate completed entry: " + name);
    cp.completed.push_back(name);
  }
  if (count->get<long long>() != static_cast<long long>(cp.completed.size())) {
    corrupt("completed_count does not match completed list");
  }
  return cp;
}

fs::path write_checkpoint(const fs::path& dir, const Checkpoint& cp) {
  const fs::path target = dir / kCheckpointFileName;
  const std::string text = serialize_checkpoint(cp);
  write_file_atomic(target, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return target;
}

std::optional<Checkpoint> read_checkpoint(const fs::path& dir) {
  const fs::path path = dir / kCheckpointFileName;
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::corrupt_checkpoint, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_checkpoint(text.str());
}

std::size_t resume(std::span<const std::string> image_filenames,
                   const std::optional<Checkpoint>& cp) {
  if (!cp || image_filenames.empty()) return 0;
  for (std::size_t i = 0; i < image_filenames.size(); ++i) {
    if (!cp->contains(image_filenames[i])) return i;
  }
  return image_filenames.size() - 1;
}

}  // namespace maskforge
