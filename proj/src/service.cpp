#include "lapseg/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <array>
#include <random>

#include "lapseg/codec.hpp"
#include "lapseg/error.hpp"
#include "lapseg/report.hpp"

namespace lapseg {

using nlohmann::json;

namespace {

json error_body(const std::string& message) { return {{"error", message}}; }

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingSeeds:
    case ErrorCode::kParameter:
    case ErrorCode::kFormat:
    case ErrorCode::kTooManyClasses:
    case ErrorCode::kTooSmall:
    case ErrorCode::kDimension:
    case ErrorCode::kInsufficientData:
      return 422;
    default:
      return 500;
  }
}

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

bool is_count(const json& v) {
  return v.is_number_integer() && v.get<std::int64_t>() >= 0;
}

}  // namespace

LabelMap scribbles_from_rle(const json& payload, std::size_t width, std::size_t height) {
  const json* runs = &payload;
  std::size_t num_classes = 0;
  if (payload.is_object()) {
    if (!payload.contains("runs")) throw Error(ErrorCode::kFormat, "scribbles need 'runs'");
    runs = &payload.at("runs");
    if (payload.contains("num_classes")) {
      const json& c = payload.at("num_classes");
      if (!is_count(c)) {
        throw Error(ErrorCode::kFormat, "num_classes must be a non-negative integer");
      }
      num_classes = c.get<std::size_t>();
    }
  }
  if (!runs->is_array()) throw Error(ErrorCode::kFormat, "scribble runs must be an array");

  const std::size_t total = width * height;
  LabelMap labels(width, height, 0);
  std::size_t index = 0;
  for (const json& run : *runs) {
    const std::string where = "run " + std::to_string(index++);
    if (!run.is_array() || run.size() != 3 ||
        !std::all_of(run.begin(), run.end(), is_count)) {
      throw Error(ErrorCode::kFormat, where + ": expected [class, start, length]");
    }
    const auto cls = run[0].get<std::uint64_t>();
    const auto start = run[1].get<std::uint64_t>();
    const auto length = run[2].get<std::uint64_t>();
    if (cls < 1 || cls > 255) throw Error(ErrorCode::kFormat, where + ": class must be 1..255");
    if (length == 0 || start >= total || length > total - start) {
      throw Error(ErrorCode::kFormat, where + " leaves the " + std::to_string(width) + "x" +
                                          std::to_string(height) + " image");
    }
    std::fill_n(labels.labels.begin() + static_cast<std::ptrdiff_t>(start), length,
                static_cast<ClassId>(cls));
    num_classes = std::max<std::size_t>(num_classes, cls);
  }
  labels.num_classes = num_classes;
  return labels;
}

json rle_from_labels(const LabelMap& labels) {
  json runs = json::array();
  std::size_t i = 0;
  while (i < labels.size()) {
    const ClassId l = labels.labels[i];
    std::size_t j = i + 1;
    while (j < labels.size() && labels.labels[j] == l) ++j;
    if (l != kUnlabeled) runs.push_back({l, i, j - i});
    i = j;
  }
  return {{"runs", runs}, {"num_classes", labels.num_classes}};
}

std::string base64_encode(std::string_view data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < data.size(); i += 3) {
    const std::uint32_t v = (static_cast<std::uint8_t>(data[i]) << 16) |
                            (static_cast<std::uint8_t>(data[i + 1]) << 8) |
                            static_cast<std::uint8_t>(data[i + 2]);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += kBase64Alphabet[v & 63];
  }
  const std::size_t rest = data.size() - i;
  if (rest > 0) {
    std::uint32_t v = static_cast<std::uint8_t>(data[i]) << 16;
    if (rest == 2) v |= static_cast<std::uint8_t>(data[i + 1]) << 8;
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += rest == 2 ? kBase64Alphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kBase64Alphabet[i])] = i;

  while (!text.empty() && text.back() == '=') text.remove_suffix(1);
  std::string out;
  out.reserve(text.size() * 3 / 4);
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    const int v = lookup[static_cast<unsigned char>(c)];
    if (v < 0) throw Error(ErrorCode::kFormat, "invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xff);
    }
  }
  if (bits >= 6) throw Error(ErrorCode::kFormat, "truncated base64 input");
  return out;
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {}

std::string SessionService::new_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  do {
    id.clear();
    for (int part = 0; part < 2; ++part) {
      std::uint64_t v = rng();
      for (int i = 0; i < 16; ++i, v >>= 4) id += kHex[v & 15];
    }
  } while (sessions_.count(id) != 0);
  return id;
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ServiceResponse SessionService::create_session(std::string_view body,
                                               std::string_view content_type) {
  expire_idle(Clock::now());
  if (body.empty()) return {400, error_body("empty image upload")};
  auto session = std::make_shared<Session>();
  try {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(body.data());
    session->image = decode_image({bytes, body.size()});
  } catch (const Error& e) {
    std::string reason = e.what();
    if (!content_type.empty()) reason += " (content type " + std::string(content_type) + ")";
    return {400, error_body(reason)};
  }
  session->last_used = Clock::now();

  std::lock_guard lock(mutex_);
  session->id = new_id();
  sessions_.emplace(session->id, session);
  return {201,
          {{"id", session->id}, {"width", session->image.width}, {"height", session->image.height}}};
}

ServiceResponse SessionService::run_segmentation(const std::string& id, std::string_view body) {
  const auto session = find(id);
  if (!session) return {404, error_body("unknown session " + id)};

  std::unique_lock run(session->run_mutex, std::try_to_lock);
  if (!run.owns_lock()) return {409, error_body("a segmentation is already running")};

  json request;
  try {
    request = json::parse(body.empty() ? std::string_view("{}") : body);
  } catch (const json::parse_error& e) {
    return {400, error_body(std::string("invalid JSON: ") + e.what())};
  }
  if (!request.is_object()) return {400, error_body("request body must be a JSON object")};

  SegConfig cfg;
  {
    std::lock_guard state(session->state_mutex);
    cfg = session->config;
    session->last_used = Clock::now();
  }
  try {
    if (request.contains("config")) apply_overrides(cfg, request.at("config"));
    const json empty = json::array();
    const LabelMap scribbles =
        scribbles_from_rle(request.contains("scribbles") ? request.at("scribbles") : empty,
                           session->image.width, session->image.height);
    const SegmentationResult result = segment(session->image, scribbles, cfg);
    const Bytes png = encode_labelmap(result.labels);

    json payload = to_json(result);
    payload["config"] = to_json(cfg);
    payload["labels_png"] =
        base64_encode({reinterpret_cast<const char*>(png.data()), png.size()});

    std::lock_guard state(session->state_mutex);
    session->config = cfg;
    session->scribbles = scribbles;
    session->result = payload;
    session->last_used = Clock::now();
    return {200, std::move(payload)};
  } catch (const Error& e) {
    return {status_for(e.code()), error_body(e.what())};
  }
}

ServiceResponse SessionService::get_result(const std::string& id) {
  const auto session = find(id);
  if (!session) return {404, error_body("unknown session " + id)};
  std::lock_guard state(session->state_mutex);
  session->last_used = Clock::now();
  if (!session->result) return {204, nullptr};
  return {200, *session->result};
}

ServiceResponse SessionService::health() const { return {200, {{"status", "ok"}}}; }

std::size_t SessionService::session_count() {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionService::expire_idle(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    Session& s = *it->second;
    std::unique_lock run(s.run_mutex, std::try_to_lock);
    bool idle = false;
    if (run.owns_lock()) {
      std::lock_guard state(s.state_mutex);
      idle = now - s.last_used > options_.idle_timeout;
    }
    it = idle ? sessions_.erase(it) : std::next(it);
  }
}

void SessionService::mount(httplib::Server& server) {
  const auto reply = [](httplib::Response& res, const ServiceResponse& out) {
    res.status = out.status;
    if (!out.body.is_null()) res.set_content(out.body.dump(), "application/json");
  };

  server.Post("/api/sessions", [this, reply](const httplib::Request& req,
                                             httplib::Response& res) {
    if (req.is_multipart_form_data()) {
      if (req.files.empty()) {
        reply(res, {400, error_body("multipart upload without a file")});
        return;
      }
      const auto& part = req.has_file("image") ? req.get_file_value("image")
                                               : req.files.begin()->second;
      reply(res, create_session(part.content, part.content_type));
      return;
    }
    reply(res, create_session(req.body, req.get_header_value("Content-Type")));
  });
  server.Post(R"(/api/sessions/([0-9a-f]+)/segment)",
              [this, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, run_segmentation(req.matches[1], req.body));
              });
  server.Get(R"(/api/sessions/([0-9a-f]+)/result)",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, get_result(req.matches[1]));
             });
  server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, health());
  });
  if (options_.static_dir) server.set_mount_point("/", options_.static_dir->string());
}

}  // namespace lapseg
