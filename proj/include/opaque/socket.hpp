#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "opaque/bytes.hpp"

namespace opaque {

/// IPv4 host and TCP port. Port 0 asks the OS for an ephemeral port when binding.
struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// Parses "host:port" (or ":port" / "port" for 127.0.0.1). Throws InvalidConfig.
  static Endpoint parse(const std::string& text);
  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Owning TCP socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) noexcept : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  bool valid() const noexcept { return fd_ >= 0; }
  int fd() const noexcept { return fd_; }
  void close() noexcept;
  void shutdown_write() noexcept;

  /// Throws IoFailure on a broken connection.
  void write_all(ByteView data);

  enum class ReadStatus { Data, Eof, Timeout };
  /// Waits up to `timeout` for readable data and appends what one recv()
  /// returns. Throws IoFailure on socket errors.
  ReadStatus read_some(ByteSequence& out, std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
};

/// Connects with a timeout. Throws TargetUnreachable.
Socket connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(5));

class Listener {
 public:
  /// Binds and listens. Throws BindFailure.
  explicit Listener(const Endpoint& endpoint, int backlog = 128);

  std::uint16_t port() const noexcept { return port_; }
  /// Waits up to `timeout` for a connection.
  std::optional<Socket> accept(std::chrono::milliseconds timeout);
  void close() noexcept { socket_.close(); }

 private:
  Socket socket_;
  std::uint16_t port_ = 0;
};

}  // namespace opaque
