#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace jetrl::bridge {

using Millis = std::chrono::milliseconds;

struct RecvResult {
  enum class Status { line, eof, timeout };
  Status status = Status::eof;
  std::string line;  // without the trailing newline
};

/// Newline-delimited byte stream over a pair of file descriptors (a socket
/// uses the same descriptor for both directions). Not thread-safe.
class LineChannel {
 public:
  LineChannel() = default;
  /// Takes ownership of the descriptors when `owns` is set.
  LineChannel(int read_fd, int write_fd, bool owns);
  ~LineChannel();

  LineChannel(LineChannel&& other) noexcept;
  LineChannel& operator=(LineChannel&& other) noexcept;
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  bool is_open() const { return read_fd_ >= 0; }

  /// Writes `line` followed by '\n'. Throws ConnectionError if the peer is
  /// gone.
  void send_line(std::string_view line);

  /// Blocks until a full line arrives, the peer closes, or `timeout`
  /// expires (no timeout when empty). Throws ConnectionError on I/O errors.
  RecvResult recv_line(std::optional<Millis> timeout = std::nullopt);

  void close();

 private:
  int read_fd_ = -1;
  int write_fd_ = -1;
  bool owns_ = false;
  bool socket_ = false;
  std::string buffer_;
};

struct HostPort {
  std::string host;
  std::uint16_t port = 0;
};

/// Parses "host:port" (host may be empty, meaning loopback). Throws
/// ConfigError.
HostPort parse_address(std::string_view address);

class TcpListener {
 public:
  /// Binds and listens; port 0 picks an ephemeral port. Throws
  /// ConnectionError.
  explicit TcpListener(const std::string& address);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }

  /// Waits up to `timeout` for a client; nullopt if none arrived.
  std::optional<LineChannel> accept(Millis timeout);

  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Throws ConnectionError when the server cannot be reached.
LineChannel tcp_connect(const std::string& address, Millis timeout = Millis(10000));

}  // namespace jetrl::bridge
