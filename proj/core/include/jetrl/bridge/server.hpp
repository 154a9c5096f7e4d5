#pragma once

#include <atomic>
#include <cstddef>
#include <string>

#include "jetrl/bridge/environment.hpp"
#include "jetrl/bridge/transport.hpp"

namespace jetrl::bridge {

struct ServerOptions {
  /// Stop after this many client sessions; 0 means serve until stop().
  std::size_t max_sessions = 0;
  /// How often the accept loop checks for stop().
  Millis poll_interval = Millis(100);
};

/// Serves one environment to one client at a time. A session starts with
/// hello -> spec, then answers reset -> obs and step -> result until bye or
/// disconnect; afterwards the environment is reset for the next client.
/// Every request line gets exactly one response line.
class EnvServer {
 public:
  explicit EnvServer(Environment& env, ServerOptions opts = {});

  /// Runs a single session on `channel`. Returns when the client says bye or
  /// disconnects. Transport failures end the session without throwing.
  void serve_session(LineChannel& channel);

  /// Accept loop; returns after stop() or max_sessions sessions.
  void serve(TcpListener& listener);

  /// Safe to call from another thread.
  void stop() { stop_.store(true); }
  std::size_t sessions_served() const { return sessions_.load(); }

 private:
  Environment& env_;
  ServerOptions opts_;
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> sessions_{0};
};

/// Serves `env` at `listen`, which is "host:port" or "stdio" (requests on
/// standard input, responses on standard output).
void serve_env(Environment& env, const std::string& listen, ServerOptions opts = {});

}  // namespace jetrl::bridge
