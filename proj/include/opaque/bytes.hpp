#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opaque {

/// Raw wire bytes. No character encoding is assumed anywhere in the library.
using ByteSequence = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Alignment alphabet: the 256 octets plus two sentinels that can never
/// appear in a trace.
using Symbol = std::uint16_t;
inline constexpr Symbol kGap = 256;
inline constexpr Symbol kWildcard = 257;

constexpr bool is_octet(Symbol s) noexcept { return s < 256; }

ByteSequence to_bytes(std::string_view text);
std::string to_string(ByteView bytes);

/// Renders a symbol row for diagnostics: gaps as '*', wildcards as '?',
/// non-printable octets as \xHH.
std::string render_symbols(std::span<const Symbol> symbols);

std::string base64_encode(ByteView bytes);
/// Returns nullopt on any malformed input (bad alphabet, bad padding, bad length).
std::optional<ByteSequence> base64_decode(std::string_view text);

enum class ErrorCode {
  MalformedRecord,
  DuplicateIndex,
  EmptyRequestOrResponse,
  IoFailure,
  TargetUnreachable,
  FramingTimeout,
  EmptyInput,
  LengthMismatch,
  InvalidConfig,
  EmptyLibrary,
  BadK,
  VersionMismatch,
  CorruptModel,
  EmptyRequest,
  BindFailure,
  TooFewTransactions,
  UnknownSpec,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure in a line-oriented file; carries the 1-based record number
/// and physical line number.
class RecordError : public Error {
 public:
  RecordError(ErrorCode code, std::size_t record, std::size_t line, const std::string& what)
      : Error(code, "record " + std::to_string(record) + " (line " + std::to_string(line) +
                        "): " + what),
        record_(record),
        line_(line) {}

  std::size_t record() const noexcept { return record_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t record_;
  std::size_t line_;
};

}  // namespace opaque
