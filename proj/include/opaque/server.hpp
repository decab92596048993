#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "opaque/emulator.hpp"
#include "opaque/framing.hpp"
#include "opaque/socket.hpp"

namespace opaque {

/// Serialized JSON-lines sink shared by connection handlers.
class LogSink {
 public:
  explicit LogSink(std::ostream* out = nullptr) : out_(out) {}
  void write(const std::string& line);

 private:
  std::ostream* out_;
  std::mutex mu_;
};

std::string utc_timestamp();

struct ServeOptions {
  Endpoint listen;
  FramingConfig framing;
  std::ostream* log = nullptr;
};

/// Playback endpoint: per framed request, match against the model, generate
/// a response and write it back on the same connection.
class EmulatorServer {
 public:
  EmulatorServer(std::shared_ptr<const OpaqueServiceModel> model, ServeOptions options);
  ~EmulatorServer();
  EmulatorServer(const EmulatorServer&) = delete;
  EmulatorServer& operator=(const EmulatorServer&) = delete;

  /// Binds and starts accepting. Throws BindFailure.
  void start();
  void stop();
  std::uint16_t port() const noexcept { return port_; }

  std::uint64_t exchanges() const noexcept { return exchanges_.load(); }
  std::uint64_t framing_errors() const noexcept { return framing_errors_.load(); }

 private:
  void accept_loop();
  void handle(Socket socket);

  std::shared_ptr<const OpaqueServiceModel> model_;
  ServeOptions options_;
  LogSink log_;
  std::unique_ptr<Listener> listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> exchanges_{0};
  std::atomic<std::uint64_t> framing_errors_{0};
  std::thread acceptor_;
  // Connection handlers run detached; stop() waits for the count to drain.
  std::mutex active_mu_;
  std::condition_variable active_cv_;
  std::size_t active_ = 0;
};

}  // namespace opaque
