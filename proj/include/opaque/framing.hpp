#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <string>

#include "opaque/bytes.hpp"
#include "opaque/socket.hpp"

namespace opaque {

enum class FramingMode {
  OnePerConnection,  // a message is everything until the peer half-closes
  IdleTimeout,       // a message ends after idle_timeout_ms without new bytes
  LengthPrefix,      // big-endian unsigned length of prefix_width bytes, then payload
  Delimiter,         // payload terminated by the delimiter bytes (not part of the message)
};

struct FramingConfig {
  FramingMode mode = FramingMode::IdleTimeout;
  std::uint32_t idle_timeout_ms = 200;
  std::uint32_t prefix_width = 4;  // 1, 2 or 4
  ByteSequence delimiter{'\n'};
  /// Upper bound for completing a started frame, and for the recording
  /// proxy's wait on a target response.
  std::uint32_t frame_timeout_ms = 5000;

  /// Throws InvalidConfig.
  void validate() const;

  /// "one-per-connection", "idle[:ms]", "length[:width]", "delimiter[:hex]".
  static FramingConfig parse(const std::string& text);
  std::string describe() const;
};

/// Wire encoding of one message under the framing.
ByteSequence encode_frame(const FramingConfig& cfg, ByteView payload);

/// Pulls framed messages off a connected socket. Bytes past a frame boundary
/// are buffered for the next call.
class MessageReader {
 public:
  MessageReader(Socket& socket, FramingConfig cfg) : socket_(socket), cfg_(std::move(cfg)) {}

  /// Next message; nullopt on a clean close between messages or when `stop`
  /// becomes true while idle. `first_byte_timeout` bounds the wait for a new
  /// message (nullopt = wait indefinitely). Throws FramingTimeout on a
  /// partial frame or an expired first-byte wait; IoFailure on socket errors.
  std::optional<ByteSequence> next(const std::atomic<bool>* stop = nullptr,
                                   std::optional<std::chrono::milliseconds> first_byte_timeout = std::nullopt);

 private:
  std::optional<ByteSequence> take_complete();
  bool fill(std::chrono::milliseconds timeout);  // false on timeout; sets eof_

  Socket& socket_;
  FramingConfig cfg_;
  ByteSequence buffer_;
  bool eof_ = false;
};

}  // namespace opaque
