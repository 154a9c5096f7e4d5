#include "jetrl/bridge/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <utility>

#include "jetrl/errors.hpp"

namespace jetrl::bridge {

namespace {

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

bool is_socket(int fd) {
  struct stat st {};
  return fstat(fd, &st) == 0 && S_ISSOCK(st.st_mode);
}

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<Millis>(
      deadline - std::chrono::steady_clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

addrinfo* resolve(const HostPort& hp, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string host = hp.host.empty() ? "127.0.0.1" : hp.host;
  const std::string port = std::to_string(hp.port);
  addrinfo* res = nullptr;
  if (const int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw ConnectionError("cannot resolve '" + host + "': " + gai_strerror(rc));
  return res;
}

}  // namespace

LineChannel::LineChannel(int read_fd, int write_fd, bool owns)
    : read_fd_(read_fd), write_fd_(write_fd), owns_(owns),
      socket_(is_socket(write_fd)) {}

LineChannel::~LineChannel() { close(); }

LineChannel::LineChannel(LineChannel&& other) noexcept { *this = std::move(other); }

LineChannel& LineChannel::operator=(LineChannel&& other) noexcept {
  if (this != &other) {
    close();
    read_fd_ = std::exchange(other.read_fd_, -1);
    write_fd_ = std::exchange(other.write_fd_, -1);
    owns_ = std::exchange(other.owns_, false);
    socket_ = other.socket_;
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

void LineChannel::close() {
  if (owns_) {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  }
  read_fd_ = write_fd_ = -1;
  owns_ = false;
  buffer_.clear();
}

void LineChannel::send_line(std::string_view line) {
  if (write_fd_ < 0) throw ConnectionError("channel is closed");
  std::string data(line);
  data += '\n';
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n =
        socket_ ? ::send(write_fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL)
                : ::write(write_fd_, data.data() + sent, data.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(errno_text("send failed"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

RecvResult LineChannel::recv_line(std::optional<Millis> timeout) {
  if (read_fd_ < 0) throw ConnectionError("channel is closed");
  const auto deadline = std::chrono::steady_clock::now() + timeout.value_or(Millis(0));
  char chunk[65536];
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      RecvResult r{RecvResult::Status::line, buffer_.substr(0, nl)};
      buffer_.erase(0, nl + 1);
      if (!r.line.empty() && r.line.back() == '\r') r.line.pop_back();
      return r;
    }
    pollfd pfd{read_fd_, POLLIN, 0};
    const int wait = timeout ? remaining_ms(deadline) : -1;
    const int rc = ::poll(&pfd, 1, wait);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(errno_text("poll failed"));
    }
    if (rc == 0) return {RecvResult::Status::timeout, {}};
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (errno == ECONNRESET) return {RecvResult::Status::eof, {}};
      throw ConnectionError(errno_text("read failed"));
    }
    if (n == 0) return {RecvResult::Status::eof, {}};
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

HostPort parse_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos)
    throw ConfigError("address '" + std::string(address) + "' is not host:port");
  HostPort hp;
  hp.host = std::string(address.substr(0, colon));
  const auto port = address.substr(colon + 1);
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535)
    throw ConfigError("invalid port in address '" + std::string(address) + "'");
  hp.port = static_cast<std::uint16_t>(value);
  return hp;
}

TcpListener::TcpListener(const std::string& address) {
  const HostPort hp = parse_address(address);
  addrinfo* res = resolve(hp, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    freeaddrinfo(res);
    throw ConnectionError(errno_text("socket failed"));
  }
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const int rc = ::bind(fd_, res->ai_addr, res->ai_addrlen);
  freeaddrinfo(res);
  if (rc < 0 || ::listen(fd_, 4) < 0) {
    const std::string msg = errno_text(("cannot listen on " + address).c_str());
    close();
    throw ConnectionError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

std::optional<LineChannel> TcpListener::accept(Millis timeout) {
  if (fd_ < 0) throw ConnectionError("listener is closed");
  pollfd pfd{fd_, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc < 0) {
    if (errno == EINTR) return std::nullopt;
    throw ConnectionError(errno_text("poll failed"));
  }
  if (rc == 0) return std::nullopt;
  const int client = ::accept(fd_, nullptr, nullptr);
  if (client < 0) {
    if (errno == EINTR || errno == EAGAIN || errno == ECONNABORTED) return std::nullopt;
    throw ConnectionError(errno_text("accept failed"));
  }
  const int one = 1;
  ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return LineChannel(client, client, true);
}

LineChannel tcp_connect(const std::string& address, Millis timeout) {
  const HostPort hp = parse_address(address);
  addrinfo* res = resolve(hp, false);
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    freeaddrinfo(res);
    throw ConnectionError(errno_text("socket failed"));
  }
  // Non-blocking connect so the timeout applies.
  const int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  freeaddrinfo(res);
  if (rc < 0 && errno == EINPROGRESS) {
    pollfd pfd{fd, POLLOUT, 0};
    rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc == 0) {
      ::close(fd);
      throw ConnectionError("connection to " + address + " timed out");
    }
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
    if (rc < 0 || err != 0) {
      ::close(fd);
      errno = err;
      throw ConnectionError(errno_text(("cannot connect to " + address).c_str()));
    }
  } else if (rc < 0) {
    const std::string msg = errno_text(("cannot connect to " + address).c_str());
    ::close(fd);
    throw ConnectionError(msg);
  }
  ::fcntl(fd, F_SETFL, flags);
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return LineChannel(fd, fd, true);
}

}  // namespace jetrl::bridge
