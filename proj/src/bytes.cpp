#include "opaque/bytes.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace opaque {

ByteSequence to_bytes(std::string_view text) { return ByteSequence(text.begin(), text.end()); }

std::string to_string(ByteView bytes) { return std::string(bytes.begin(), bytes.end()); }

std::string render_symbols(std::span<const Symbol> symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) {
    if (s == kGap) {
      out.push_back('*');
    } else if (s == kWildcard) {
      out.push_back('?');
    } else if (s >= 0x20 && s < 0x7f) {
      out.push_back(static_cast<char>(s));
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned>(s));
      out += buf;
    }
  }
  return out;
}

std::string base64_encode(ByteView bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::optional<ByteSequence> base64_decode(std::string_view text) {
  if (text.empty()) return ByteSequence{};
  if (text.size() % 4 != 0) return std::nullopt;
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  // '=' is only legal in the final two positions.
  if (text.substr(0, text.size() - pad).find('=') != std::string_view::npos) return std::nullopt;
  for (char c : text) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '+' || c == '/' || c == '=';
    if (!ok) return std::nullopt;
  }
  ByteSequence out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) return std::nullopt;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::EmptyRequestOrResponse: return "EmptyRequestOrResponse";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::FramingTimeout: return "FramingTimeout";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::EmptyRequest: return "EmptyRequest";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::TooFewTransactions: return "TooFewTransactions";
    case ErrorCode::UnknownSpec: return "UnknownSpec";
  }
  return "Unknown";
}

}  // namespace opaque
