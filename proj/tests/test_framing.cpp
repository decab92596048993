#include <doctest.h>

#include <thread>

#include "support.hpp"

using namespace opaque;
using namespace std::chrono_literals;

namespace {

// Connected pair over loopback: (client, server side).
std::pair<Socket, Socket> socket_pair() {
  Listener l(opaque::testing::loopback());
  Socket client = connect_to(opaque::testing::loopback(l.port()));
  auto server = l.accept(2s);
  REQUIRE(server);
  return {std::move(client), std::move(*server)};
}

}  // namespace

TEST_CASE("framing parse and describe") {
  CHECK(FramingConfig::parse("one-per-connection").mode == FramingMode::OnePerConnection);
  const auto idle = FramingConfig::parse("idle:50");
  CHECK(idle.mode == FramingMode::IdleTimeout);
  CHECK(idle.idle_timeout_ms == 50);
  CHECK(FramingConfig::parse("length:2").prefix_width == 2);
  CHECK(FramingConfig::parse("delimiter:0d0a").delimiter == ByteSequence{'\r', '\n'});
  CHECK(FramingConfig::parse("delimiter").delimiter == ByteSequence{'\n'});
  CHECK_THROWS_AS(FramingConfig::parse("length:3"), Error);
  CHECK_THROWS_AS(FramingConfig::parse("delimiter:zz"), Error);
  CHECK_THROWS_AS(FramingConfig::parse("bogus"), Error);
  CHECK(FramingConfig::parse(FramingConfig::parse("length:2").describe()).prefix_width == 2);
}

TEST_CASE("endpoint parse") {
  CHECK(Endpoint::parse("127.0.0.1:8080").port == 8080);
  CHECK(Endpoint::parse("localhost:9").host == "127.0.0.1");
  CHECK(Endpoint::parse(":77").port == 77);
  CHECK_THROWS_AS(Endpoint::parse("127.0.0.1:99999"), Error);
  CHECK_THROWS_AS(Endpoint::parse("nohost:"), Error);
}

TEST_CASE("encode frames") {
  FramingConfig len = FramingConfig::parse("length:2");
  CHECK(encode_frame(len, to_bytes("abc")) == ByteSequence{0, 3, 'a', 'b', 'c'});
  FramingConfig len1 = FramingConfig::parse("length:1");
  CHECK_THROWS_AS(encode_frame(len1, ByteSequence(300, 'x')), Error);
  CHECK(encode_frame(FramingConfig::parse("delimiter"), to_bytes("ab")) == to_bytes("ab\n"));
}

TEST_CASE("length-prefixed messages split across writes") {
  auto [client, server] = socket_pair();
  const auto cfg = FramingConfig::parse("length:4");
  ByteSequence wire = encode_frame(cfg, to_bytes("first"));
  const auto second = encode_frame(cfg, to_bytes("second"));
  wire.insert(wire.end(), second.begin(), second.end());
  std::thread writer([&, &c = client] {
    for (auto b : wire) {
      c.write_all(ByteView(&b, 1));
    }
    c.shutdown_write();
  });
  MessageReader reader(server, cfg);
  CHECK(to_string(*reader.next()) == "first");
  CHECK(to_string(*reader.next()) == "second");
  CHECK_FALSE(reader.next());
  writer.join();
}

TEST_CASE("delimiter framing with several messages in one write") {
  auto [client, server] = socket_pair();
  const auto cfg = FramingConfig::parse("delimiter:0d0a");
  client.write_all(to_bytes("a\r\nbb\r\nccc\r\n"));
  client.shutdown_write();
  MessageReader reader(server, cfg);
  CHECK(to_string(*reader.next()) == "a");
  CHECK(to_string(*reader.next()) == "bb");
  CHECK(to_string(*reader.next()) == "ccc");
  CHECK_FALSE(reader.next());
}

TEST_CASE("one message per connection") {
  auto [client, server] = socket_pair();
  client.write_all(to_bytes("whole"));
  client.write_all(to_bytes(" message"));
  client.shutdown_write();
  MessageReader reader(server, FramingConfig::parse("one-per-connection"));
  CHECK(to_string(*reader.next()) == "whole message");
  CHECK_FALSE(reader.next());
}

TEST_CASE("idle timeout ends a message") {
  auto [client, server] = socket_pair();
  MessageReader reader(server, FramingConfig::parse("idle:50"));
  client.write_all(to_bytes("one"));
  CHECK(to_string(*reader.next()) == "one");
  client.write_all(to_bytes("two"));
  CHECK(to_string(*reader.next()) == "two");
}

TEST_CASE("partial frame times out") {
  auto [client, server] = socket_pair();
  auto cfg = FramingConfig::parse("length:4");
  cfg.frame_timeout_ms = 100;
  client.write_all(ByteSequence{0, 0, 0, 9, 'x'});
  MessageReader reader(server, cfg);
  try {
    reader.next();
    FAIL("expected FramingTimeout");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FramingTimeout);
  }
}

TEST_CASE("truncated frame at close is a framing error") {
  auto [client, server] = socket_pair();
  client.write_all(ByteSequence{0, 0, 0, 9, 'x'});
  client.shutdown_write();
  MessageReader reader(server, FramingConfig::parse("length:4"));
  CHECK_THROWS_AS(reader.next(), Error);
}

TEST_CASE("unreachable target") {
  Listener l(opaque::testing::loopback());
  const auto port = l.port();
  l.close();
  try {
    connect_to(opaque::testing::loopback(port), 500ms);
    FAIL("expected TargetUnreachable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TargetUnreachable);
  }
}
