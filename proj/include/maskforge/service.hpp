#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "maskforge/error.hpp"
#include "maskforge/session.hpp"
#include "maskforge/superpixel.hpp"

namespace httplib {
class Server;
}

namespace maskforge {

enum class Frame { global, roi };

enum class OpKind { box, ellipse, polygon, curve, paint, erase, delete_mark, superpixel_click };

struct OpRequest {
  std::string session_id;
  OpKind op = OpKind::box;
  std::string class_name;
  Frame frame = Frame::global;
  Edit geometry;  // coordinates in `frame`
};

struct OpResult {
  std::size_t changed_bits = 0;
  std::optional<RoiRect> bounding_box_of_change;
  std::uint64_t mask_version = 0;
};

/// Parses the /api/op body; throws malformed-geometry on bad payloads.
OpRequest parse_op_request(const nlohmann::json& body);
nlohmann::json to_json(const OpResult& result);

struct SuperpixelSummary {
  int region_count = 0;
  std::string image_digest;
  SlicParams params;
  bool cache_hit = false;
};

/// Transport-independent service state: one session plus superpixel cache and
/// per-(image, class) mask versions. Mutations are serialized; reads share.
class Service {
 public:
  explicit Service(Session session);

  const std::string& session_id() const noexcept { return session_id_; }

  nlohmann::json session_info() const;
  std::size_t navigate(int delta);
  void set_roi(const RoiRect& rect);
  void clear_roi();
  void add_class(const std::string& name);
  void set_active_class(const std::string& name);
  void set_class_style(const std::string& name, const ClassStyle& style);

  OpResult apply_op(const OpRequest& request);

  std::vector<std::uint8_t> image_png(Frame frame) const;
  std::vector<std::uint8_t> overlay_png(Frame frame) const;

  /// Computes or reuses the SLIC map of the current view. A newer request
  /// supersedes one still running.
  SuperpixelSummary get_superpixels(const SlicParams& params);
  std::vector<std::uint8_t> superpixel_preview() const;

  std::vector<fs::path> export_masks();
  std::vector<fs::path> flush();

  /// Read access for tests and tools; callers must not race with mutations.
  const Session& session() const noexcept { return session_; }

 private:
  struct CacheEntry {
    std::shared_ptr<const SuperpixelMap> map;
    std::vector<std::uint8_t> preview_png;
  };

  static std::string cache_key(const std::string& digest, const SlicParams& params);

  mutable std::shared_mutex mutex_;
  Session session_;
  std::string session_id_;
  std::map<std::pair<std::size_t, std::string>, std::uint64_t> versions_;

  mutable std::mutex cache_mutex_;
  std::map<std::string, CacheEntry> cache_;
  std::deque<std::string> cache_order_;
  std::optional<CacheEntry> latest_;
  std::atomic<std::uint64_t> slic_generation_{0};
};

/// Registers the /api routes on `server`.
void install_routes(httplib::Server& server, Service& service);

/// HTTP status used for an error code.
int http_status(ErrorCode code);

/// Binds, serves until SIGINT/SIGTERM, then flushes dirty masks.
void serve(Service& service, const std::string& host, int port);

}  // namespace maskforge
