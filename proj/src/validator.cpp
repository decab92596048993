#include "opaque/validator.hpp"

#include <algorithm>

namespace opaque {

const char* reason_name(InvalidReason reason) noexcept {
  switch (reason) {
    case InvalidReason::None: return "none";
    case InvalidReason::ParseFailure: return "parse-failure";
    case InvalidReason::WrongOperation: return "wrong-operation";
  }
  return "?";
}

std::optional<KeyValueMessage> parse_directory_message(ByteView message) {
  if (message.size() < 2 || message.front() != '{' || message.back() != '}') return std::nullopt;
  const std::string body(message.begin() + 1, message.end() - 1);
  if (body.find_first_of("{}") != std::string::npos) return std::nullopt;
  KeyValueMessage out;
  if (body.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = body.find(',', start);
    const std::string item = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) return std::nullopt;
    out.emplace_back(item.substr(0, colon), item.substr(colon + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace {

std::optional<std::string> op_of(const KeyValueMessage& msg) {
  auto it = std::find_if(msg.begin(), msg.end(), [](const auto& kv) { return kv.first == "op"; });
  if (it == msg.end()) return std::nullopt;
  return it->second;
}

}  // namespace

ValidationOutcome directory_validator(ByteView expected, ByteView emulated) {
  const auto got = parse_directory_message(emulated);
  if (!got) return {Verdict::Invalid, InvalidReason::ParseFailure};
  const auto want = parse_directory_message(expected);
  const auto want_op = want ? op_of(*want) : std::nullopt;
  if (op_of(*got) != want_op) return {Verdict::Invalid, InvalidReason::WrongOperation};
  return {Verdict::Valid, InvalidReason::None};
}

Validator directory_response_validator() {
  return [](ByteView expected, const std::optional<ByteSequence>& emulated) {
    if (!emulated) return ValidationOutcome{Verdict::Invalid, InvalidReason::ParseFailure};
    return directory_validator(expected, *emulated);
  };
}

}  // namespace opaque
