#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opaque/bytes.hpp"

namespace opaque {

enum class Verdict { Valid, Invalid };
enum class InvalidReason { None, ParseFailure, WrongOperation };

struct ValidationOutcome {
  Verdict verdict = Verdict::Invalid;
  InvalidReason reason = InvalidReason::ParseFailure;

  bool valid() const noexcept { return verdict == Verdict::Valid; }
  friend bool operator==(const ValidationOutcome&, const ValidationOutcome&) = default;
};

const char* reason_name(InvalidReason reason) noexcept;

using KeyValueMessage = std::vector<std::pair<std::string, std::string>>;

/// Parses `{key:value,key:value,...}`: one brace pair enclosing the whole
/// message, no nested braces, every comma-separated item holding a
/// non-empty key before its first ':'.
std::optional<KeyValueMessage> parse_directory_message(ByteView message);

/// Protocol decoder check: the emulated response must parse and carry the
/// same `op` value as the expected one. Payload values may differ.
ValidationOutcome directory_validator(ByteView expected, ByteView emulated);

/// `emulated` is nullopt when a responder produced nothing; that counts as
/// a parse failure.
using Validator = std::function<ValidationOutcome(ByteView expected, const std::optional<ByteSequence>& emulated)>;

Validator directory_response_validator();

}  // namespace opaque
