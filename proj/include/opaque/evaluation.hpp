#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opaque/responders.hpp"
#include "opaque/validator.hpp"

namespace opaque {

/// Seeded partition of positions 0..n-1 into `folds` disjoint groups whose
/// union is everything. Group sizes differ by at most one.
std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds, std::uint64_t seed,
                                                     std::size_t repeat);

struct CrossValidationOptions {
  ResponderKind responder = ResponderKind::Prototype;
  std::size_t folds = 10;
  std::size_t repeats = 10;
  std::uint64_t seed = 1;
  BuildOptions build;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::size_t total = 0;
  std::size_t valid = 0;
  std::size_t parse_failures = 0;
  std::size_t wrong_operation = 0;

  friend bool operator==(const FoldResult&, const FoldResult&) = default;
};

struct AccuracyReport {
  std::string responder;
  std::size_t folds = 0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::size_t total = 0;
  std::size_t valid = 0;
  double accuracy = 0.0;
  std::vector<FoldResult> per_fold;  // ordered by (repeat, fold)

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// k-fold cross-validation, repeated. Every fold rebuilds the responder from
/// the other folds and answers each held-out request; the validator compares
/// the answer with the recorded response. Throws TooFewTransactions.
AccuracyReport cross_validate(const TransactionLibrary& library, const CrossValidationOptions& options,
                              const Validator& validator = directory_response_validator());

struct ResponderTiming {
  std::string responder;
  std::size_t samples = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
};

struct BenchmarkReport {
  std::size_t library_size = 0;
  std::size_t request_count = 0;
  std::vector<ResponderTiming> timings;  // hash, whole-library, prototype

  const ResponderTiming& timing(const std::string& responder) const;
  nlohmann::json to_json() const;
  std::string to_table() const;
};

ResponderTiming summarize_timings(std::string responder, std::vector<double> millis);

/// Times response generation of the three responders on the same request
/// sequence, `repetitions` passes each after `warmup` untimed responses.
BenchmarkReport benchmark(const TransactionLibrary& library, const OpaqueServiceModel& model,
                          std::span<const ByteSequence> requests, std::size_t repetitions = 1,
                          std::size_t warmup = 20);

}  // namespace opaque
