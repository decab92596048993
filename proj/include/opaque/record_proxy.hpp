#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "opaque/framing.hpp"
#include "opaque/server.hpp"
#include "opaque/socket.hpp"
#include "opaque/trace.hpp"

namespace opaque {

struct RecordOptions {
  Endpoint listen;
  Endpoint target;
  FramingConfig framing;
  std::optional<std::filesystem::path> out;  // written on stop()
  std::ostream* log = nullptr;
};

/// Transparent TCP proxy that pairs each framed client request with the
/// target's framed response and appends the pair to a library. Pairing is
/// strictly sequential per client connection.
class RecordingProxy {
 public:
  explicit RecordingProxy(RecordOptions options);
  ~RecordingProxy();
  RecordingProxy(const RecordingProxy&) = delete;
  RecordingProxy& operator=(const RecordingProxy&) = delete;

  /// Throws BindFailure.
  void start();
  /// Stops accepting, waits for open connections, persists the library if
  /// an output path was configured.
  void stop();
  std::uint16_t port() const noexcept { return port_; }

  /// Snapshot of what has been recorded so far.
  TransactionLibrary library() const;
  std::uint64_t dropped() const noexcept { return dropped_.load(); }

 private:
  void accept_loop();
  void handle(Socket client);
  void handle_single(Socket client);
  void append(ByteSequence request, ByteSequence response);

  RecordOptions options_;
  LogSink log_;
  std::unique_ptr<Listener> listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  bool stopped_ = false;
  std::atomic<std::uint64_t> dropped_{0};
  std::thread acceptor_;

  mutable std::mutex library_mu_;
  TransactionLibrary library_;
  TransactionIndex next_index_ = 0;

  std::mutex active_mu_;
  std::condition_variable active_cv_;
  std::size_t active_ = 0;
};

}  // namespace opaque
