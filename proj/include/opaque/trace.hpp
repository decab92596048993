#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "opaque/bytes.hpp"

namespace opaque {

using TransactionIndex = std::uint64_t;

struct Transaction {
  TransactionIndex index = 0;
  ByteSequence request;
  ByteSequence response;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Ordered collection of recorded transactions. Iteration order is the
/// load/record order; indices are unique.
class TransactionLibrary {
 public:
  TransactionLibrary() = default;

  /// Throws DuplicateIndex or EmptyRequestOrResponse.
  void add(Transaction t);

  std::span<const Transaction> transactions() const noexcept { return transactions_; }
  std::size_t size() const noexcept { return transactions_.size(); }
  bool empty() const noexcept { return transactions_.empty(); }
  const Transaction& operator[](std::size_t position) const { return transactions_[position]; }

  const Transaction* find(TransactionIndex index) const;
  /// Position of the transaction with this index in iteration order.
  std::size_t position_of(TransactionIndex index) const;

  /// New library with the transactions at the given positions, in that order.
  TransactionLibrary subset(std::span<const std::size_t> positions) const;

  auto begin() const noexcept { return transactions_.begin(); }
  auto end() const noexcept { return transactions_.end(); }

  friend bool operator==(const TransactionLibrary& a, const TransactionLibrary& b) {
    return a.transactions_ == b.transactions_;
  }

 private:
  std::vector<Transaction> transactions_;
  std::unordered_map<TransactionIndex, std::size_t> by_index_;
};

// Trace file format: UTF-8/ASCII text, one record per line,
//   <index> TAB <base64(request)> TAB <base64(response)> LF
// Lines that are empty or start with '#' are ignored. See docs/formats.md.
inline constexpr const char* kTraceHeader = "# opaque-trace v1";

TransactionLibrary read_library(std::istream& in);
void write_library(const TransactionLibrary& library, std::ostream& out);

/// Throws IoFailure, MalformedRecord, DuplicateIndex.
TransactionLibrary load_library(const std::filesystem::path& path);
/// Throws IoFailure.
void save_library(const TransactionLibrary& library, const std::filesystem::path& path);

}  // namespace opaque
