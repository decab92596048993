#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <sstream>
#include <thread>

#include "opaque/record_proxy.hpp"
#include "opaque/server.hpp"
#include "opaque/synthetic.hpp"
#include "opaque/validator.hpp"
#include "support.hpp"

using namespace opaque;
using namespace std::chrono_literals;
using opaque::testing::exchange;
using opaque::testing::loopback;

namespace {

// Scripted target service: answers "R:" + request, or hangs up on requests
// starting with "close".
class FakeTarget {
 public:
  explicit FakeTarget(FramingConfig framing) : framing_(std::move(framing)), listener_(loopback()) {
    thread_ = std::thread([this] { run(); });
  }
  ~FakeTarget() {
    stop_ = true;
    thread_.join();
  }
  std::uint16_t port() const { return listener_.port(); }

 private:
  void run() {
    std::vector<std::thread> workers;
    while (!stop_) {
      auto s = listener_.accept(50ms);
      if (!s) continue;
      workers.emplace_back([this, sock = std::move(*s)]() mutable { serve(sock); });
    }
    for (auto& w : workers) w.join();
  }

  void serve(Socket& sock) {
    MessageReader reader(sock, framing_);
    try {
      while (auto msg = reader.next(&stop_, 2000ms)) {
        if (to_string(*msg).rfind("close", 0) == 0) return;
        ByteSequence reply = to_bytes("R:");
        reply.insert(reply.end(), msg->begin(), msg->end());
        sock.write_all(framing_.mode == FramingMode::OnePerConnection ? reply : encode_frame(framing_, reply));
        if (framing_.mode == FramingMode::OnePerConnection) return;
      }
    } catch (const std::exception&) {
    }
  }

  FramingConfig framing_;
  Listener listener_;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

ByteSequence one_shot(std::uint16_t port, const std::string& request) {
  Socket s = connect_to(loopback(port));
  s.write_all(to_bytes(request));
  s.shutdown_write();
  MessageReader reader(s, FramingConfig::parse("one-per-connection"));
  auto msg = reader.next(nullptr, 3000ms);
  return msg ? *msg : ByteSequence{};
}

std::shared_ptr<const OpaqueServiceModel> directory_model() {
  BuildOptions opts;
  opts.clusters = 2;
  return std::make_shared<const OpaqueServiceModel>(build_model(directory_example_library().library, opts));
}

}  // namespace

TEST_CASE("proxy records a single exchange verbatim") {
  const auto framing = FramingConfig::parse("one-per-connection");
  FakeTarget target(framing);
  RecordOptions opts{loopback(), loopback(target.port()), framing, std::nullopt, nullptr};
  RecordingProxy proxy(opts);
  proxy.start();
  CHECK(to_string(one_shot(proxy.port(), "{id:1,op:S,sn:Du}")) == "R:{id:1,op:S,sn:Du}");
  proxy.stop();
  const auto lib = proxy.library();
  REQUIRE(lib.size() == 1);
  CHECK(to_string(lib[0].request) == "{id:1,op:S,sn:Du}");
  CHECK(to_string(lib[0].response) == "R:{id:1,op:S,sn:Du}");
}

TEST_CASE("proxy keeps send order across connections") {
  const auto framing = FramingConfig::parse("one-per-connection");
  FakeTarget target(framing);
  const auto out = std::filesystem::temp_directory_path() / "opaque_test_proxy.trace";
  RecordingProxy proxy({loopback(), loopback(target.port()), framing, out, nullptr});
  proxy.start();
  for (int i = 0; i < 10; ++i) one_shot(proxy.port(), "req" + std::to_string(i));
  proxy.stop();
  const auto lib = load_library(out);
  REQUIRE(lib.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(lib[i].index == i);
    CHECK(to_string(lib[i].request) == "req" + std::to_string(i));
  }
  std::filesystem::remove(out);
}

TEST_CASE("proxy pairs pipelined requests on a persistent connection") {
  const auto framing = FramingConfig::parse("length:2");
  FakeTarget target(framing);
  RecordingProxy proxy({loopback(), loopback(target.port()), framing, std::nullopt, nullptr});
  proxy.start();
  {
    Socket s = connect_to(loopback(proxy.port()));
    ByteSequence wire;
    for (int i = 0; i < 5; ++i) {
      const auto f = encode_frame(framing, to_bytes("m" + std::to_string(i)));
      wire.insert(wire.end(), f.begin(), f.end());
    }
    s.write_all(wire);
    MessageReader reader(s, framing);
    for (int i = 0; i < 5; ++i) CHECK(to_string(*reader.next(nullptr, 3000ms)) == "R:m" + std::to_string(i));
  }
  proxy.stop();
  const auto lib = proxy.library();
  REQUIRE(lib.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(to_string(lib[i].response) == "R:m" + std::to_string(i));
}

TEST_CASE("target hanging up records nothing and closes the client") {
  const auto framing = FramingConfig::parse("one-per-connection");
  FakeTarget target(framing);
  std::ostringstream log;
  RecordingProxy proxy({loopback(), loopback(target.port()), framing, std::nullopt, &log});
  proxy.start();
  CHECK(one_shot(proxy.port(), "close now").empty());
  proxy.stop();
  CHECK(proxy.library().empty());
  CHECK(log.str().find("TargetUnreachable") != std::string::npos);
}

TEST_CASE("unreachable target surfaces to the client") {
  Listener dead(loopback());
  const auto port = dead.port();
  dead.close();
  const auto framing = FramingConfig::parse("one-per-connection");
  RecordingProxy proxy({loopback(), loopback(port), framing, std::nullopt, nullptr});
  proxy.start();
  CHECK(one_shot(proxy.port(), "hello").empty());
  proxy.stop();
  CHECK(proxy.library().empty());
}

TEST_CASE("server answers the example add request") {
  std::ostringstream log;
  const auto framing = FramingConfig::parse("delimiter");
  EmulatorServer server(directory_model(), {loopback(), framing, &log});
  server.start();
  {
    Socket s = connect_to(loopback(server.port()));
    MessageReader reader(s, framing);
    CHECK(to_string(exchange(s, reader, framing, to_bytes("{id:37,op:A,sn:Durand}"))) ==
          "{id:37,op:AddRsp,result:Ok}");
  }
  server.stop();
  CHECK(server.exchanges() == 1);
  const auto line = nlohmann::json::parse(log.str());
  CHECK(line["cluster"] == 1);
  CHECK(line["request_bytes"] == 22);
  CHECK(line["response_bytes"] == 27);
  CHECK(line.contains("d_rel"));
  CHECK(line.contains("latency_us"));
  CHECK(line.contains("ts"));
}

TEST_CASE("server with one message per connection") {
  const auto framing = FramingConfig::parse("one-per-connection");
  EmulatorServer server(directory_model(), {loopback(), framing, nullptr});
  server.start();
  CHECK(to_string(one_shot(server.port(), "{id:37,op:A,sn:Durand}")) == "{id:37,op:AddRsp,result:Ok}");
  server.stop();
}

TEST_CASE("connect and close without sending leaves no log entry") {
  std::ostringstream log;
  EmulatorServer server(directory_model(), {loopback(), FramingConfig::parse("delimiter"), &log});
  server.start();
  { Socket s = connect_to(loopback(server.port())); }
  std::this_thread::sleep_for(100ms);
  server.stop();
  CHECK(log.str().empty());
  CHECK(server.exchanges() == 0);
}

TEST_CASE("concurrent clients get uncorrupted responses") {
  const auto framing = FramingConfig::parse("length:4");
  EmulatorServer server(directory_model(), {loopback(), framing, nullptr});
  server.start();
  std::atomic<int> valid{0};
  std::vector<std::thread> clients;
  for (int c = 0; c < 50; ++c) {
    clients.emplace_back([&, c] {
      Socket s = connect_to(loopback(server.port()));
      MessageReader reader(s, framing);
      for (int r = 0; r < 20; ++r) {
        const bool add = (c + r) % 2 == 0;
        const auto id = std::to_string(c * 100 + r);
        const auto req = add ? "{id:" + id + ",op:A,sn:Zed}" : "{id:" + id + ",op:S,sn:Zed}";
        const auto expected = add ? "{id:1,op:AddRsp,result:Ok}" : "{id:1,op:SearchRsp,result:Ok}";
        const auto resp = exchange(s, reader, framing, to_bytes(req));
        if (directory_validator(to_bytes(expected), resp).valid() && to_string(resp).rfind("{id:" + id + ",", 0) == 0)
          ++valid;
      }
    });
  }
  for (auto& t : clients) t.join();
  server.stop();
  CHECK(valid == 1000);
  CHECK(server.exchanges() == 1000);
}

TEST_CASE("binding a busy port fails") {
  EmulatorServer first(directory_model(), {loopback(), FramingConfig::parse("delimiter"), nullptr});
  first.start();
  EmulatorServer second(directory_model(), {loopback(first.port()), FramingConfig::parse("delimiter"), nullptr});
  try {
    second.start();
    FAIL("expected BindFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BindFailure);
  }
  first.stop();
}
