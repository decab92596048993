#include "opaque/server.hpp"

#include <chrono>
#include <ctime>
#include <json.hpp>

namespace opaque {

void LogSink::write(const std::string& line) {
  if (out_ == nullptr) return;
  std::lock_guard lock(mu_);
  *out_ << line << '\n';
  out_->flush();
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto micros = duration_cast<microseconds>(now.time_since_epoch()).count() % 1000000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[64];
  std::snprintf(out, sizeof out, "%s.%06lldZ", buf, static_cast<long long>(micros));
  return out;
}

EmulatorServer::EmulatorServer(std::shared_ptr<const OpaqueServiceModel> model, ServeOptions options)
    : model_(std::move(model)), options_(std::move(options)), log_(options_.log) {
  options_.framing.validate();
  model_->validate();
}

EmulatorServer::~EmulatorServer() { stop(); }

void EmulatorServer::start() {
  listener_ = std::make_unique<Listener>(options_.listen);
  port_ = listener_->port();
  acceptor_ = std::thread([this] { accept_loop(); });
}

void EmulatorServer::stop() {
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::unique_lock lock(active_mu_);
    active_cv_.wait(lock, [this] { return active_ == 0; });
  }
  if (listener_) listener_->close();
}

void EmulatorServer::accept_loop() {
  while (!stopping_) {
    auto conn = listener_->accept(std::chrono::milliseconds(50));
    if (!conn) continue;
    {
      std::lock_guard lock(active_mu_);
      ++active_;
    }
    std::thread([this, s = std::move(*conn)]() mutable {
      handle(std::move(s));
      std::lock_guard lock(active_mu_);
      --active_;
      active_cv_.notify_all();
    }).detach();
  }
}

void EmulatorServer::handle(Socket socket) {
  MessageReader reader(socket, options_.framing);
  try {
    while (!stopping_) {
      auto request = reader.next(&stopping_);
      if (!request) break;
      const auto started = std::chrono::steady_clock::now();
      if (request->empty()) {
        log_.write(nlohmann::json{{"ts", utc_timestamp()}, {"event", "empty-request"}}.dump());
        continue;
      }
      const auto result = emulate(*model_, *request);
      socket.write_all(encode_frame(options_.framing, result.response));
      const auto latency =
          std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
      ++exchanges_;
      log_.write(nlohmann::json{{"ts", utc_timestamp()},
                                {"cluster", result.match.chosen},
                                {"d_rel", result.match.chosen_distance},
                                {"latency_us", latency.count()},
                                {"request_bytes", request->size()},
                                {"response_bytes", result.response.size()}}
                     .dump());
      if (options_.framing.mode == FramingMode::OnePerConnection) break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::FramingTimeout) ++framing_errors_;
    log_.write(nlohmann::json{{"ts", utc_timestamp()}, {"event", "connection-error"}, {"error", e.what()}}.dump());
  }
  socket.shutdown_write();
}

}  // namespace opaque
