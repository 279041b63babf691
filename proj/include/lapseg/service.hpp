#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "lapseg/image.hpp"
#include "lapseg/pipeline.hpp"

namespace httplib {
class Server;
}

namespace lapseg {

// Scribble payload: {"runs": [[class, start, length], ...]} over row-major
// pixel offsets, optionally with "num_classes". Throws kFormat on malformed
// or out-of-range runs.
LabelMap scribbles_from_rle(const nlohmann::json& payload, std::size_t width,
                            std::size_t height);
nlohmann::json rle_from_labels(const LabelMap& labels);

std::string base64_encode(std::string_view data);
std::string base64_decode(std::string_view text);

struct ServiceOptions {
  std::chrono::seconds idle_timeout{30 * 60};
  std::optional<std::filesystem::path> static_dir;
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;  // null for bodiless responses
};

/// In-memory sessions; every public call is thread-safe.
class SessionService {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionService(ServiceOptions options = {});

  ServiceResponse create_session(std::string_view body, std::string_view content_type);
  ServiceResponse run_segmentation(const std::string& id, std::string_view body);
  ServiceResponse get_result(const std::string& id);
  ServiceResponse health() const;

  // Registers the REST routes (and static assets when configured).
  void mount(httplib::Server& server);

  std::size_t session_count();
  // Drops sessions idle for longer than the timeout as of `now`.
  void expire_idle(Clock::time_point now);

 private:
  struct Session {
    std::string id;
    RgbImage image;
    std::optional<LabelMap> scribbles;
    std::optional<nlohmann::json> result;
    SegConfig config;
    Clock::time_point last_used;
    std::mutex run_mutex;    // held for the duration of a segmentation
    std::mutex state_mutex;  // guards scribbles, result, last_used
  };

  std::shared_ptr<Session> find(const std::string& id);
  std::string new_id();

  ServiceOptions options_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace lapseg
