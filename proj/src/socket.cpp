#include "opaque/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <utility>

namespace opaque {

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  std::string port_text = text;
  const auto colon = text.rfind(':');
  if (colon != std::string::npos) {
    if (colon > 0) ep.host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535) {
    throw Error(ErrorCode::InvalidConfig, "bad endpoint '" + text + "'");
  }
  if (ep.host == "localhost") ep.host = "127.0.0.1";
  in_addr probe{};
  if (inet_pton(AF_INET, ep.host.c_str(), &probe) != 1) {
    throw Error(ErrorCode::InvalidConfig, "bad IPv4 address '" + ep.host + "'");
  }
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

namespace {

sockaddr_in to_sockaddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr);
  return addr;
}

std::string errno_text() { return std::strerror(errno); }

}  // namespace

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

void Socket::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown_write() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

void Socket::write_all(ByteView data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::IoFailure, "send: " + errno_text());
    }
    sent += static_cast<std::size_t>(n);
  }
}

Socket::ReadStatus Socket::read_some(ByteSequence& out, std::chrono::milliseconds timeout) {
  pollfd pfd{fd_, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  } while (rc < 0 && errno == EINTR);
  if (rc < 0) throw Error(ErrorCode::IoFailure, "poll: " + errno_text());
  if (rc == 0) return ReadStatus::Timeout;
  std::uint8_t buf[16384];
  ssize_t n;
  do {
    n = ::recv(fd_, buf, sizeof buf, 0);
  } while (n < 0 && errno == EINTR);
  if (n < 0) {
    if (errno == ECONNRESET) return ReadStatus::Eof;
    throw Error(ErrorCode::IoFailure, "recv: " + errno_text());
  }
  if (n == 0) return ReadStatus::Eof;
  out.insert(out.end(), buf, buf + n);
  return ReadStatus::Data;
}

Socket connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw Error(ErrorCode::TargetUnreachable, "socket: " + errno_text());
  const int flags = ::fcntl(s.fd(), F_GETFL, 0);
  ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
  const auto addr = to_sockaddr(endpoint);
  int rc = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
  if (rc < 0 && errno != EINPROGRESS) {
    throw Error(ErrorCode::TargetUnreachable, endpoint.to_string() + ": " + errno_text());
  }
  if (rc < 0) {
    pollfd pfd{s.fd(), POLLOUT, 0};
    rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) throw Error(ErrorCode::TargetUnreachable, endpoint.to_string() + ": connect timed out");
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      throw Error(ErrorCode::TargetUnreachable, endpoint.to_string() + ": " + std::strerror(err));
    }
  }
  ::fcntl(s.fd(), F_SETFL, flags);
  const int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return s;
}

Listener::Listener(const Endpoint& endpoint, int backlog) {
  socket_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
  if (!socket_.valid()) throw Error(ErrorCode::BindFailure, "socket: " + errno_text());
  const int one = 1;
  ::setsockopt(socket_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const auto addr = to_sockaddr(endpoint);
  if (::bind(socket_.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
    throw Error(ErrorCode::BindFailure, endpoint.to_string() + ": " + errno_text());
  }
  if (::listen(socket_.fd(), backlog) < 0) {
    throw Error(ErrorCode::BindFailure, endpoint.to_string() + ": " + errno_text());
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

std::optional<Socket> Listener::accept(std::chrono::milliseconds timeout) {
  pollfd pfd{socket_.fd(), POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc <= 0) return std::nullopt;
  const int fd = ::accept(socket_.fd(), nullptr, nullptr);
  if (fd < 0) return std::nullopt;
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Socket(fd);
}

}  // namespace opaque
