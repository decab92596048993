#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opaque/trace.hpp"

namespace opaque {

/// One operation type of a text protocol in the style of the directory
/// service example. Templates substitute ${id}, ${sn}, ${gn}, ${mobile},
/// ${postcode}, ${bool} and ${count}; the same values feed the request and
/// the response of a transaction.
struct SyntheticOperation {
  std::string name;
  std::string request_template;
  std::string response_template;
  double weight = 1.0;
};

struct SyntheticProtocolSpec {
  std::string name;
  std::vector<SyntheticOperation> operations;
  /// Ids are unique and drawn uniformly from [1, max(id_max, 10 n)].
  std::uint64_t id_max = 9999;
  /// Probability that a request reuses every payload value of an earlier
  /// transaction of a different operation with the same payload fields.
  double lookalike_rate = 0.0;

  /// Throws UnknownSpec on an unusable spec (no operations, duplicate names,
  /// bad weights, unknown placeholders).
  void validate() const;

  static SyntheticProtocolSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Five operation types (search, add, delete, update, compare).
SyntheticProtocolSpec directory_spec();
/// Search/delete and add/update pairs whose requests differ only in the
/// operation byte, with payload values shared across operations.
SyntheticProtocolSpec payload_confusion_spec(double lookalike_rate = 0.3);
/// Resolves a preset name: "directory", "confusion".
SyntheticProtocolSpec preset_spec(const std::string& name);

struct LabeledLibrary {
  TransactionLibrary library;
  std::vector<std::string> labels;  // operation name per library position
};

LabeledLibrary synthetic_library(const SyntheticProtocolSpec& spec, std::size_t n, std::uint64_t seed);

/// The eight-transaction directory service example (search and add
/// operations with ids 1, 13, 24, 275, 490, 2273, 2487, 3106), byte for byte.
LabeledLibrary directory_example_library();

}  // namespace opaque
