#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "opaque/synthetic.hpp"
#include "opaque/trace.hpp"

using namespace opaque;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("opaque_test_" + name);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("base64 round trip") {
  CHECK(base64_encode(to_bytes("")) == "");
  CHECK(base64_encode(to_bytes("{id:1,op:S,sn:Du}")) == "e2lkOjEsb3A6UyxzbjpEdX0=");
  for (std::size_t n = 0; n < 40; ++n) {
    ByteSequence b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(i * 37 + 11);
    auto back = base64_decode(base64_encode(b));
    REQUIRE(back);
    CHECK(*back == b);
  }
  CHECK_FALSE(base64_decode("abc"));
  CHECK_FALSE(base64_decode("ab!="));
}

TEST_CASE("empty trace gives an empty library") {
  std::istringstream in(std::string(kTraceHeader) + "\n");
  CHECK(read_library(in).empty());
  std::istringstream blank("");
  CHECK(read_library(blank).empty());
}

TEST_CASE("directory example loads with its eight indices") {
  const auto lib = directory_example_library().library;
  std::stringstream buf;
  write_library(lib, buf);
  const auto back = read_library(buf);
  REQUIRE(back.size() == 8);
  std::vector<TransactionIndex> idx;
  for (const auto& t : back) idx.push_back(t.index);
  CHECK(idx == std::vector<TransactionIndex>{1, 13, 24, 275, 490, 2273, 2487, 3106});
  CHECK(to_string(back.find(1)->request) == "{id:1,op:S,sn:Du}");
  CHECK(to_string(back.find(1)->response) == "{id:1,op:SearchRsp,result:Ok,gn:Miao,sn:Du,mobile:5362634}");
  CHECK(back == lib);
}

TEST_CASE("second record with an empty response is malformed") {
  std::istringstream in(std::string(kTraceHeader) + "\n1\te2lkOjF9\te2lkOjF9\n2\te2lkOjJ9\t\n");
  try {
    read_library(in);
    FAIL("expected MalformedRecord");
  } catch (const RecordError& e) {
    CHECK(e.code() == ErrorCode::MalformedRecord);
    CHECK(e.record() == 2);
    CHECK(e.line() == 3);
  }
}

TEST_CASE("malformed lines") {
  const std::string h = std::string(kTraceHeader) + "\n";
  for (std::string bad : {"x\tQQ==\tQQ==\n", "1\tQQ==\n", "1\tQQ==\tQQ==\textra\n", "1\t!!!!\tQQ==\n", "-1\tQQ==\tQQ==\n"}) {
    std::istringstream in(h + bad);
    CHECK_THROWS_AS(read_library(in), RecordError);
  }
  std::istringstream dup(h + "1\tQQ==\tQQ==\n1\tQg==\tQg==\n");
  try {
    read_library(dup);
    FAIL("expected DuplicateIndex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateIndex);
  }
}

TEST_CASE("library rejects empty fields and duplicates") {
  TransactionLibrary lib;
  lib.add({5, to_bytes("a"), to_bytes("b")});
  CHECK_THROWS_AS(lib.add({5, to_bytes("c"), to_bytes("d")}), Error);
  try {
    lib.add({6, {}, to_bytes("d")});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRequestOrResponse);
  }
  CHECK(lib.size() == 1);
  CHECK(lib.position_of(5) == 0);
  CHECK(lib.find(6) == nullptr);
}

TEST_CASE("save and load are byte-identical, all octets included") {
  TransactionLibrary lib;
  ByteSequence all(256);
  for (int i = 0; i < 256; ++i) all[i] = static_cast<std::uint8_t>(i);
  ByteSequence reversed(all.rbegin(), all.rend());
  lib.add({0, all, reversed});
  lib.add({7, to_bytes("\n\t#"), to_bytes("\r\n")});
  const auto p1 = temp_path("octets1.trace");
  const auto p2 = temp_path("octets2.trace");
  save_library(lib, p1);
  const auto back = load_library(p1);
  CHECK(back == lib);
  save_library(back, p2);
  CHECK(read_file(p1) == read_file(p2));

  const auto pe = temp_path("empty.trace");
  save_library(TransactionLibrary{}, pe);
  CHECK(load_library(pe).empty());
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
  std::filesystem::remove(pe);
}

TEST_CASE("missing file is an io failure") {
  try {
    load_library(temp_path("does_not_exist.trace"));
    FAIL("expected IoFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
  }
}
