#include "opaque/framing.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace opaque {

void FramingConfig::validate() const {
  switch (mode) {
    case FramingMode::IdleTimeout:
      if (idle_timeout_ms == 0) throw Error(ErrorCode::InvalidConfig, "idle timeout must be positive");
      break;
    case FramingMode::LengthPrefix:
      if (prefix_width != 1 && prefix_width != 2 && prefix_width != 4) {
        throw Error(ErrorCode::InvalidConfig, "length prefix width must be 1, 2 or 4");
      }
      break;
    case FramingMode::Delimiter:
      if (delimiter.empty()) throw Error(ErrorCode::InvalidConfig, "delimiter must be non-empty");
      break;
    case FramingMode::OnePerConnection:
      break;
  }
  if (frame_timeout_ms == 0) throw Error(ErrorCode::InvalidConfig, "frame timeout must be positive");
}

namespace {

std::uint32_t parse_uint(const std::string& s, const std::string& what) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidConfig, "bad " + what + " '" + s + "'");
  }
  return v;
}

ByteSequence parse_hex(const std::string& s) {
  if (s.empty() || s.size() % 2 != 0) throw Error(ErrorCode::InvalidConfig, "bad delimiter hex '" + s + "'");
  ByteSequence out;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + i + 2, v, 16);
    if (ec != std::errc{} || ptr != s.data() + i + 2) {
      throw Error(ErrorCode::InvalidConfig, "bad delimiter hex '" + s + "'");
    }
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

}  // namespace

FramingConfig FramingConfig::parse(const std::string& text) {
  FramingConfig cfg;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "one-per-connection") {
    cfg.mode = FramingMode::OnePerConnection;
  } else if (name == "idle") {
    cfg.mode = FramingMode::IdleTimeout;
    if (!arg.empty()) cfg.idle_timeout_ms = parse_uint(arg, "idle timeout");
  } else if (name == "length") {
    cfg.mode = FramingMode::LengthPrefix;
    if (!arg.empty()) cfg.prefix_width = parse_uint(arg, "prefix width");
  } else if (name == "delimiter") {
    cfg.mode = FramingMode::Delimiter;
    if (!arg.empty()) cfg.delimiter = parse_hex(arg);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown framing mode '" + name + "'");
  }
  cfg.validate();
  return cfg;
}

std::string FramingConfig::describe() const {
  switch (mode) {
    case FramingMode::OnePerConnection: return "one-per-connection";
    case FramingMode::IdleTimeout: return "idle:" + std::to_string(idle_timeout_ms);
    case FramingMode::LengthPrefix: return "length:" + std::to_string(prefix_width);
    case FramingMode::Delimiter: {
      std::string hex;
      char buf[3];
      for (auto b : delimiter) {
        std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned>(b));
        hex += buf;
      }
      return "delimiter:" + hex;
    }
  }
  return "?";
}

ByteSequence encode_frame(const FramingConfig& cfg, ByteView payload) {
  ByteSequence out;
  switch (cfg.mode) {
    case FramingMode::LengthPrefix: {
      const std::uint64_t limit = cfg.prefix_width >= 4 ? 0xffffffffULL : (1ULL << (8 * cfg.prefix_width)) - 1;
      if (payload.size() > limit) throw Error(ErrorCode::InvalidConfig, "message too long for length prefix");
      for (std::uint32_t i = cfg.prefix_width; i-- > 0;) {
        out.push_back(static_cast<std::uint8_t>(payload.size() >> (8 * i)));
      }
      out.insert(out.end(), payload.begin(), payload.end());
      break;
    }
    case FramingMode::Delimiter:
      out.assign(payload.begin(), payload.end());
      out.insert(out.end(), cfg.delimiter.begin(), cfg.delimiter.end());
      break;
    default:
      out.assign(payload.begin(), payload.end());
  }
  return out;
}

std::optional<ByteSequence> MessageReader::take_complete() {
  if (cfg_.mode == FramingMode::LengthPrefix) {
    if (buffer_.size() < cfg_.prefix_width) return std::nullopt;
    std::size_t len = 0;
    for (std::uint32_t i = 0; i < cfg_.prefix_width; ++i) len = (len << 8) | buffer_[i];
    if (buffer_.size() < cfg_.prefix_width + len) return std::nullopt;
    ByteSequence msg(buffer_.begin() + cfg_.prefix_width, buffer_.begin() + static_cast<std::ptrdiff_t>(cfg_.prefix_width + len));
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(cfg_.prefix_width + len));
    return msg;
  }
  if (cfg_.mode == FramingMode::Delimiter) {
    auto it = std::search(buffer_.begin(), buffer_.end(), cfg_.delimiter.begin(), cfg_.delimiter.end());
    if (it == buffer_.end()) return std::nullopt;
    ByteSequence msg(buffer_.begin(), it);
    buffer_.erase(buffer_.begin(), it + static_cast<std::ptrdiff_t>(cfg_.delimiter.size()));
    return msg;
  }
  return std::nullopt;
}

bool MessageReader::fill(std::chrono::milliseconds timeout) {
  switch (socket_.read_some(buffer_, std::max(timeout, std::chrono::milliseconds(0)))) {
    case Socket::ReadStatus::Data: return true;
    case Socket::ReadStatus::Eof: eof_ = true; return true;
    case Socket::ReadStatus::Timeout: return false;
  }
  return false;
}

std::optional<ByteSequence> MessageReader::next(const std::atomic<bool>* stop,
                                                std::optional<std::chrono::milliseconds> first_byte_timeout) {
  using clock = std::chrono::steady_clock;
  using std::chrono::milliseconds;
  constexpr milliseconds kTick(50);

  if (auto m = take_complete()) return m;

  if (buffer_.empty()) {
    if (eof_) return std::nullopt;
    const auto deadline = first_byte_timeout ? std::optional(clock::now() + *first_byte_timeout) : std::nullopt;
    while (true) {
      if (stop != nullptr && stop->load()) return std::nullopt;
      milliseconds wait = kTick;
      if (deadline) {
        const auto left = std::chrono::duration_cast<milliseconds>(*deadline - clock::now());
        if (left.count() <= 0) throw Error(ErrorCode::FramingTimeout, "no message within the wait window");
        wait = std::min(wait, left);
      }
      if (fill(wait)) break;
    }
    if (buffer_.empty()) return std::nullopt;  // clean close
  }

  if (cfg_.mode == FramingMode::IdleTimeout) {
    while (!eof_ && fill(milliseconds(cfg_.idle_timeout_ms))) {
    }
    return std::exchange(buffer_, {});
  }

  const auto frame_deadline = clock::now() + milliseconds(cfg_.frame_timeout_ms);
  while (true) {
    if (cfg_.mode == FramingMode::OnePerConnection) {
      if (eof_) return std::exchange(buffer_, {});
    } else {
      if (auto m = take_complete()) return m;
      if (eof_) throw Error(ErrorCode::FramingTimeout, "connection closed inside a frame");
    }
    const auto left = std::chrono::duration_cast<milliseconds>(frame_deadline - clock::now());
    if (left.count() <= 0) throw Error(ErrorCode::FramingTimeout, "frame incomplete after timeout");
    fill(std::min(left, kTick));
  }
}

}  // namespace opaque
