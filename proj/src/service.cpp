#include "maskforge/service.hpp"

#include <pthread.h>
#include <signal.h>

#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "maskforge/error.hpp"

namespace maskforge {

using nlohmann::json;

namespace {

Error malformed(const std::string& why) { return Error(ErrorCode::malformed_geometry, why); }

double number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw malformed(std::string("missing number '") + key + "'");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw malformed(std::string("non-finite '") + key + "'");
  return v;
}

int integer(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw malformed(std::string("missing integer '") + key + "'");
  }
  return it->get<int>();
}

RoiRect rect_from(const json& j) {
  return {integer(j, "x0"), integer(j, "y0"), integer(j, "w"), integer(j, "h")};
}

std::vector<Point2> points_from(const json& j) {
  const auto it = j.find("points");
  if (it == j.end() || !it->is_array()) throw malformed("missing 'points' array");
  std::vector<Point2> out;
  for (const auto& p : *it) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw malformed("points must be [x, y] pairs");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
    if (!std::isfinite(out.back().x) || !std::isfinite(out.back().y)) {
      throw malformed("non-finite point");
    }
  }
  return out;
}

Stroke stroke_from(const json& j) {
  Stroke s{points_from(j), number(j, "radius")};
  if (s.points.empty()) throw malformed("stroke needs at least one point");
  if (s.radius < 0) throw malformed("radius must be >= 0");
  return s;
}

OpKind op_from(const std::string& name) {
  static const std::map<std::string, OpKind> kOps{
      {"box", OpKind::box},         {"ellipse", OpKind::ellipse},
      {"polygon", OpKind::polygon}, {"curve", OpKind::curve},
      {"paint", OpKind::paint},     {"erase", OpKind::erase},
      {"delete_mark", OpKind::delete_mark}, {"superpixel_click", OpKind::superpixel_click},
  };
  const auto it = kOps.find(name);
  if (it == kOps.end()) throw malformed("unknown op '" + name + "'");
  return it->second;
}

json rect_json(const std::optional<RoiRect>& r) {
  if (!r) return nullptr;
  return {{"x0", r->x0}, {"y0", r->y0}, {"w", r->w}, {"h", r->h}};
}

std::string random_token() {
  std::random_device rd;
  std::uniform_int_distribution<unsigned> dist(0, 15);
  std::string token;
  for (int i = 0; i < 32; ++i) token.push_back("0123456789abcdef"[dist(rd)]);
  return token;
}

}  // namespace

OpRequest parse_op_request(const json& body) {
  if (!body.is_object()) throw malformed("request body must be an object");
  OpRequest req;
  if (const auto it = body.find("session_id"); it != body.end() && it->is_string()) {
    req.session_id = it->get<std::string>();
  }
  const auto op = body.find("op");
  if (op == body.end() || !op->is_string()) throw malformed("missing 'op'");
  req.op = op_from(op->get<std::string>());
  const auto cls = body.find("class_name");
  if (cls == body.end() || !cls->is_string()) throw malformed("missing 'class_name'");
  req.class_name = cls->get<std::string>();
  if (const auto it = body.find("frame"); it != body.end()) {
    if (*it == "roi") {
      req.frame = Frame::roi;
    } else if (*it == "global") {
      req.frame = Frame::global;
    } else {
      throw malformed("frame must be 'roi' or 'global'");
    }
  }
  const auto geo_it = body.find("geometry");
  if (geo_it == body.end() || !geo_it->is_object()) throw malformed("missing 'geometry'");
  const json& g = *geo_it;

  switch (req.op) {
    case OpKind::box:
      req.geometry = BoxEdit{rect_from(g)};
      break;
    case OpKind::ellipse: {
      EllipseEdit e{{number(g, "cx"), number(g, "cy")}, number(g, "a"), number(g, "b")};
      if (e.semi_x < 0 || e.semi_y < 0) throw malformed("semi-axes must be >= 0");
      req.geometry = e;
      break;
    }
    case OpKind::polygon: {
      auto pts = points_from(g);
      if (pts.size() < 3) throw malformed("polygon needs at least 3 vertices");
      req.geometry = PolygonEdit{std::move(pts)};
      break;
    }
    case OpKind::curve: {
      auto pts = points_from(g);
      if (pts.size() < 3) throw malformed("curve needs at least 3 samples");
      req.geometry = CurveEdit{std::move(pts)};
      break;
    }
    case OpKind::paint:
      req.geometry = PaintEdit{stroke_from(g)};
      break;
    case OpKind::erase:
      req.geometry = EraseEdit{stroke_from(g)};
      break;
    case OpKind::delete_mark:
      req.geometry = DeleteMarkEdit{rect_from(g)};
      break;
    case OpKind::superpixel_click:
      req.geometry = SuperpixelClick{{number(g, "x"), number(g, "y")}};
      break;
  }
  return req;
}

json to_json(const OpResult& result) {
  return {{"changed_bits", result.changed_bits},
          {"bounding_box_of_change", rect_json(result.bounding_box_of_change)},
          {"mask_version", result.mask_version}};
}

Service::Service(Session session) : session_(std::move(session)), session_id_(random_token()) {}

json Service::session_info() const {
  std::shared_lock lock(mutex_);
  json classes = json::array();
  for (const auto& e : session_.registry().entries()) {
    classes.push_back({{"name", e.name},
                       {"color", {e.style.color.r, e.style.color.g, e.style.color.b}},
                       {"opacity", e.style.opacity}});
  }
  json names = json::array();
  for (const auto& n : session_.image_filenames()) names.push_back(n);
  return {{"session_id", session_id_},
          {"images", session_.images().size()},
          {"image_names", names},
          {"current", session_.current()},
          {"width", session_.image().width},
          {"height", session_.image().height},
          {"classes", classes},
          {"active", session_.registry().empty() ? json(nullptr)
                                                 : json(session_.registry().active_name())},
          {"roi", rect_json(session_.roi())},
          {"dirty", session_.dirty()}};
}

std::size_t Service::navigate(int delta) {
  std::unique_lock lock(mutex_);
  return session_.navigate(delta);
}

void Service::set_roi(const RoiRect& rect) {
  std::unique_lock lock(mutex_);
  session_.set_roi(rect);
}

void Service::clear_roi() {
  std::unique_lock lock(mutex_);
  session_.clear_roi();
}

void Service::add_class(const std::string& name) {
  std::unique_lock lock(mutex_);
  session_.add_class(name);
}

void Service::set_active_class(const std::string& name) {
  std::unique_lock lock(mutex_);
  session_.set_active_class(name);
}

void Service::set_class_style(const std::string& name, const ClassStyle& style) {
  std::unique_lock lock(mutex_);
  session_.set_class_style(name, style);
}

OpResult Service::apply_op(const OpRequest& request) {
  std::unique_lock lock(mutex_);
  if (request.session_id != session_id_) fail(ErrorCode::unknown_session, "unknown session");
  if (!session_.registry().contains(request.class_name)) {
    fail(ErrorCode::unknown_class, "unknown class: " + request.class_name);
  }

  const ImageRecord& img = session_.image();
  Edit edit = request.geometry;
  std::optional<RoiRect> frame_roi;
  if (request.frame == Frame::roi) {
    if (!session_.roi()) throw malformed("frame 'roi' requires an active ROI");
    frame_roi = session_.roi();
  }
  if (const auto* click = std::get_if<SuperpixelClick>(&edit)) {
    edit = SuperpixelClick{to_global(frame_roi, click->point, img.width, img.height)};
  } else if (frame_roi) {
    edit = translate_edit(edit, frame_roi->x0, frame_roi->y0);
  }

  std::shared_ptr<const SuperpixelMap> map;
  {
    std::lock_guard cache_lock(cache_mutex_);
    if (latest_) map = latest_->map;
  }
  const EditResult edit_result = session_.apply(request.class_name, edit, map.get());
  OpResult result;
  result.changed_bits = edit_result.changed_bits;
  result.bounding_box_of_change = edit_result.changed_box;
  result.mask_version = ++versions_[{session_.current(), request.class_name}];
  return result;
}

std::vector<std::uint8_t> Service::image_png(Frame frame) const {
  std::shared_lock lock(mutex_);
  return encode_png(frame == Frame::roi ? session_.view() : session_.image());
}

std::vector<std::uint8_t> Service::overlay_png(Frame frame) const {
  ImageRecord out;
  {
    std::shared_lock lock(mutex_);
    out = render_overlay(session_.image(), session_.masks(), session_.registry());
    if (frame == Frame::roi && session_.roi()) out = crop(out, *session_.roi());
  }
  return encode_png(out);
}

std::string Service::cache_key(const std::string& digest, const SlicParams& params) {
  std::ostringstream key;
  key.precision(17);
  key << digest << '|' << params.k << '|' << params.m << '|' << params.iterations;
  return key.str();
}

SuperpixelSummary Service::get_superpixels(const SlicParams& params) {
  const std::uint64_t generation = ++slic_generation_;
  ImageRecord view;
  {
    std::shared_lock lock(mutex_);
    view = session_.view();
  }
  validate_slic_params(params, view.pixel_count());
  const std::string digest = image_digest(view);
  const std::string key = cache_key(digest, params);

  {
    std::lock_guard cache_lock(cache_mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) {
      latest_ = it->second;
      return {it->second.map->region_count, digest, params, true};
    }
  }

  SlicOptions options;
  options.cancelled = [this, generation] { return slic_generation_.load() != generation; };
  auto map = std::make_shared<const SuperpixelMap>(compute_slic(view, params, options));
  CacheEntry entry{map, encode_png(render_boundaries(view, *map))};

  std::lock_guard cache_lock(cache_mutex_);
  constexpr std::size_t kCacheLimit = 8;
  if (cache_.emplace(key, entry).second) cache_order_.push_back(key);
  while (cache_order_.size() > kCacheLimit) {
    cache_.erase(cache_order_.front());
    cache_order_.pop_front();
  }
  if (slic_generation_.load() == generation) latest_ = entry;
  return {map->region_count, digest, params, false};
}

std::vector<std::uint8_t> Service::superpixel_preview() const {
  std::string digest;
  {
    std::shared_lock lock(mutex_);
    digest = image_digest(session_.view());
  }
  std::lock_guard cache_lock(cache_mutex_);
  if (!latest_ || latest_->map->image_digest != digest) {
    fail(ErrorCode::stale_superpixel_map, "no superpixel map for the current view");
  }
  return latest_->preview_png;
}

std::vector<fs::path> Service::export_masks() {
  std::unique_lock lock(mutex_);
  return session_.export_current();
}

std::vector<fs::path> Service::flush() {
  std::unique_lock lock(mutex_);
  return session_.flush();
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_session:
    case ErrorCode::unknown_class:
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::stale_superpixel_map:
    case ErrorCode::superseded:
    case ErrorCode::duplicate_class_name:
      return 409;
    case ErrorCode::io_failure:
    case ErrorCode::corrupt_file:
    case ErrorCode::corrupt_checkpoint:
      return 500;
    default:
      return 400;
  }
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_png(httplib::Response& res, const std::vector<std::uint8_t>& png) {
  res.status = 200;
  res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
}

json body_of(const httplib::Request& req) {
  try {
    return req.body.empty() ? json::object() : json::parse(req.body);
  } catch (const json::exception&) {
    throw malformed("request body is not valid JSON");
  }
}

std::string required_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw malformed(std::string("missing '") + key + "'");
  return it->get<std::string>();
}

Frame frame_param(const httplib::Request& req) {
  if (!req.has_param("frame")) return Frame::global;
  const auto v = req.get_param_value("frame");
  if (v == "roi") return Frame::roi;
  if (v == "global") return Frame::global;
  throw malformed("frame must be 'roi' or 'global'");
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_json(res, {{"error", error_code_name(e.code())}, {"message", e.what()}},
                http_status(e.code()));
    } catch (const std::exception& e) {
      send_json(res, {{"error", "internal"}, {"message", e.what()}}, 500);
    }
  };
}

}  // namespace

void install_routes(httplib::Server& server, Service& service) {
  server.Get("/api/session", guarded([&](const httplib::Request&, httplib::Response& res) {
               send_json(res, service.session_info());
             }));
  server.Post("/api/session/navigate",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                const int delta = integer(body, "delta");
                if (delta != 1 && delta != -1) throw malformed("delta must be +1 or -1");
                send_json(res, {{"current", service.navigate(delta)}});
              }));
  server.Post("/api/session/roi", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const RoiRect rect = rect_from(body_of(req));
                service.set_roi(rect);
                send_json(res, {{"roi", rect_json(rect)}});
              }));
  server.Delete("/api/session/roi", guarded([&](const httplib::Request&, httplib::Response& res) {
                  service.clear_roi();
                  send_json(res, {{"roi", nullptr}});
                }));
  server.Post("/api/classes", guarded([&](const httplib::Request& req, httplib::Response& res) {
                service.add_class(required_string(body_of(req), "name"));
                send_json(res, service.session_info()["classes"]);
              }));
  server.Post("/api/classes/active",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                const std::string name = required_string(body_of(req), "name");
                service.set_active_class(name);
                send_json(res, {{"active", name}});
              }));
  server.Post("/api/classes/style",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                const std::string name = required_string(body, "name");
                const auto color = body.find("color");
                if (color == body.end() || !color->is_array() || color->size() != 3) {
                  throw malformed("color must be [r, g, b]");
                }
                ClassStyle style;
                int channel[3];
                for (int i = 0; i < 3; ++i) {
                  if (!(*color)[i].is_number_integer()) throw malformed("color channels must be integers");
                  channel[i] = (*color)[i].get<int>();
                  if (channel[i] < 0 || channel[i] > 255) throw malformed("color channel out of range");
                }
                style.color = {static_cast<std::uint8_t>(channel[0]),
                               static_cast<std::uint8_t>(channel[1]),
                               static_cast<std::uint8_t>(channel[2])};
                style.opacity = number(body, "opacity");
                service.set_class_style(name, style);
                send_json(res, {{"name", name}});
              }));
  server.Post("/api/op", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, to_json(service.apply_op(parse_op_request(body_of(req)))));
              }));
  server.Get("/api/image", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_png(res, service.image_png(frame_param(req)));
             }));
  server.Get("/api/overlay", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_png(res, service.overlay_png(frame_param(req)));
             }));
  server.Get("/api/superpixels", guarded([&](const httplib::Request& req, httplib::Response& res) {
               if (req.has_param("session_id") &&
                   req.get_param_value("session_id") != service.session_id()) {
                 fail(ErrorCode::unknown_session, "unknown session");
               }
               SlicParams params;
               try {
                 if (req.has_param("k")) params.k = std::stoi(req.get_param_value("k"));
                 if (req.has_param("m")) params.m = std::stod(req.get_param_value("m"));
                 if (req.has_param("iterations")) {
                   params.iterations = std::stoi(req.get_param_value("iterations"));
                 }
               } catch (const std::exception&) {
                 fail(ErrorCode::invalid_params, "k, m and iterations must be numbers");
               }
               const SuperpixelSummary s = service.get_superpixels(params);
               send_json(res, {{"region_count", s.region_count},
                               {"image_digest", s.image_digest},
                               {"k", s.params.k},
                               {"m", s.params.m},
                               {"iterations", s.params.iterations},
                               {"cache_hit", s.cache_hit}});
             }));
  server.Get("/api/superpixels/preview",
             guarded([&](const httplib::Request&, httplib::Response& res) {
               send_png(res, service.superpixel_preview());
             }));
  server.Post("/api/export", guarded([&](const httplib::Request&, httplib::Response& res) {
                json written = json::array();
                for (const auto& p : service.export_masks()) written.push_back(p.string());
                send_json(res, {{"written", written}});
              }));
}

void serve(Service& service, const std::string& host, int port) {
  // Block termination signals before the server spawns worker threads so a
  // dedicated thread can receive them with sigwait.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  install_routes(server, service);
  if (!server.bind_to_port(host, port)) {
    fail(ErrorCode::bind_failure, "cannot bind " + host + ":" + std::to_string(port));
  }

  std::thread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  std::cerr << "maskforge: serving on " << host << ":" << port << std::endl;
  server.listen_after_bind();

  // listen returned without a signal (e.g. stop() from elsewhere): wake the waiter.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  const auto written = service.flush();
  std::cerr << "maskforge: flushed " << written.size() << " mask file(s)" << std::endl;
}

}  // namespace maskforge
