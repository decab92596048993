#include "opaque/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace opaque {

void TransactionLibrary::add(Transaction t) {
  if (t.request.empty() || t.response.empty()) {
    throw Error(ErrorCode::EmptyRequestOrResponse,
                "transaction " + std::to_string(t.index) + " has an empty request or response");
  }
  if (by_index_.contains(t.index)) {
    throw Error(ErrorCode::DuplicateIndex, "transaction index " + std::to_string(t.index));
  }
  by_index_.emplace(t.index, transactions_.size());
  transactions_.push_back(std::move(t));
}

const Transaction* TransactionLibrary::find(TransactionIndex index) const {
  auto it = by_index_.find(index);
  return it == by_index_.end() ? nullptr : &transactions_[it->second];
}

std::size_t TransactionLibrary::position_of(TransactionIndex index) const {
  auto it = by_index_.find(index);
  if (it == by_index_.end()) {
    throw std::out_of_range("no transaction with index " + std::to_string(index));
  }
  return it->second;
}

TransactionLibrary TransactionLibrary::subset(std::span<const std::size_t> positions) const {
  TransactionLibrary out;
  out.transactions_.reserve(positions.size());
  for (std::size_t p : positions) out.add(transactions_.at(p));
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

TransactionLibrary read_library(std::istream& in) {
  TransactionLibrary library;
  std::string line;
  std::size_t line_no = 0;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ++record;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw RecordError(ErrorCode::MalformedRecord, record, line_no,
                        "expected 3 tab-separated fields, found " + std::to_string(fields.size()));
    }
    TransactionIndex index = 0;
    const auto idx = fields[0];
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    if (idx.empty() || ec != std::errc{} || ptr != idx.data() + idx.size()) {
      throw RecordError(ErrorCode::MalformedRecord, record, line_no, "bad index field");
    }
    if (fields[1].empty() || fields[2].empty()) {
      throw RecordError(ErrorCode::MalformedRecord, record, line_no, "empty request or response");
    }
    auto request = base64_decode(fields[1]);
    auto response = base64_decode(fields[2]);
    if (!request || !response) {
      throw RecordError(ErrorCode::MalformedRecord, record, line_no, "bad base64 payload");
    }
    if (library.find(index) != nullptr) {
      throw RecordError(ErrorCode::DuplicateIndex, record, line_no,
                        "index " + std::to_string(index) + " already present");
    }
    library.add(Transaction{index, std::move(*request), std::move(*response)});
  }
  return library;
}

void write_library(const TransactionLibrary& library, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& t : library) {
    out << t.index << '\t' << base64_encode(t.request) << '\t' << base64_encode(t.response) << '\n';
  }
}

TransactionLibrary load_library(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_library(in);
}

void save_library(const TransactionLibrary& library, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  write_library(library, out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace opaque
