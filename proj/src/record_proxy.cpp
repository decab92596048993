#include "opaque/record_proxy.hpp"

#include <json.hpp>

namespace opaque {

using std::chrono::milliseconds;

RecordingProxy::RecordingProxy(RecordOptions options) : options_(std::move(options)), log_(options_.log) {
  options_.framing.validate();
}

RecordingProxy::~RecordingProxy() {
  try {
    stop();
  } catch (...) {
  }
}

void RecordingProxy::start() {
  listener_ = std::make_unique<Listener>(options_.listen);
  port_ = listener_->port();
  acceptor_ = std::thread([this] { accept_loop(); });
}

void RecordingProxy::stop() {
  if (stopped_) return;
  stopped_ = true;
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::unique_lock lock(active_mu_);
    active_cv_.wait(lock, [this] { return active_ == 0; });
  }
  if (listener_) listener_->close();
  if (options_.out) save_library(library(), *options_.out);
}

TransactionLibrary RecordingProxy::library() const {
  std::lock_guard lock(library_mu_);
  return library_;
}

void RecordingProxy::append(ByteSequence request, ByteSequence response) {
  std::lock_guard lock(library_mu_);
  const auto index = next_index_++;
  library_.add(Transaction{index, std::move(request), std::move(response)});
  log_.write(nlohmann::json{{"ts", utc_timestamp()}, {"event", "recorded"}, {"index", index}}.dump());
}

void RecordingProxy::accept_loop() {
  while (!stopping_) {
    auto conn = listener_->accept(milliseconds(50));
    if (!conn) continue;
    {
      std::lock_guard lock(active_mu_);
      ++active_;
    }
    std::thread([this, s = std::move(*conn)]() mutable {
      try {
        if (options_.framing.mode == FramingMode::OnePerConnection) {
          handle_single(std::move(s));
        } else {
          handle(std::move(s));
        }
      } catch (const std::exception& e) {
        log_.write(nlohmann::json{{"ts", utc_timestamp()}, {"event", "connection-error"}, {"error", e.what()}}.dump());
      }
      std::lock_guard lock(active_mu_);
      --active_;
      active_cv_.notify_all();
    }).detach();
  }
}

void RecordingProxy::handle_single(Socket client) {
  MessageReader from_client(client, options_.framing);
  auto request = from_client.next(&stopping_);
  if (!request || request->empty()) return;
  Socket target = connect_to(options_.target);
  target.write_all(*request);
  target.shutdown_write();
  MessageReader from_target(target, options_.framing);
  std::optional<ByteSequence> response;
  try {
    response = from_target.next(nullptr, milliseconds(options_.framing.frame_timeout_ms));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FramingTimeout) throw;
    ++dropped_;
    log_.write(nlohmann::json{{"ts", utc_timestamp()}, {"event", "dropped"}, {"error", e.what()}}.dump());
    return;
  }
  if (!response || response->empty()) {
    throw Error(ErrorCode::TargetUnreachable, "target closed the connection without replying");
  }
  client.write_all(*response);
  client.shutdown_write();
  append(std::move(*request), std::move(*response));
}

void RecordingProxy::handle(Socket client) {
  Socket target = connect_to(options_.target);
  MessageReader from_client(client, options_.framing);
  MessageReader from_target(target, options_.framing);
  while (!stopping_) {
    auto request = from_client.next(&stopping_);
    if (!request) break;
    target.write_all(encode_frame(options_.framing, *request));
    std::optional<ByteSequence> response;
    try {
      response = from_target.next(nullptr, milliseconds(options_.framing.frame_timeout_ms));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FramingTimeout) throw;
      ++dropped_;
      log_.write(nlohmann::json{{"ts", utc_timestamp()}, {"event", "dropped"}, {"error", e.what()}}.dump());
      continue;
    }
    if (!response) {
      // Closing the client connection is how the failure reaches the client.
      throw Error(ErrorCode::TargetUnreachable, "target closed the connection without replying");
    }
    client.write_all(encode_frame(options_.framing, *response));
    if (request->empty() || response->empty()) {
      ++dropped_;
      continue;
    }
    append(std::move(*request), std::move(*response));
  }
}

}  // namespace opaque
