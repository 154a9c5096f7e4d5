#include "jetrl/bridge/server.hpp"

#include <unistd.h>

#include "jetrl/bridge/message.hpp"
#include "jetrl/errors.hpp"

namespace jetrl::bridge {

EnvServer::EnvServer(Environment& env, ServerOptions opts)
    : env_(env), opts_(opts) {}

void EnvServer::serve_session(LineChannel& channel) {
  bool greeted = false;
  bool has_reset = false;

  auto reply = [&](const Message& m) { channel.send_line(encode(m)); };

  try {
    while (!stop_.load()) {
      const RecvResult in = channel.recv_line(opts_.poll_interval);
      if (in.status == RecvResult::Status::timeout) continue;
      if (in.status == RecvResult::Status::eof) break;

      Message req;
      try {
        req = decode(in.line);
      } catch (const UnknownKindError& e) {
        reply(Message::error(error_code::unknown_kind, e.what()));
        continue;
      } catch (const CodecError& e) {
        reply(Message::error(error_code::malformed,
                             std::string(e.what()) + " (byte " +
                                 std::to_string(e.byte_offset()) + ")"));
        continue;
      }

      if (req.kind == MessageKind::bye) {
        reply(Message::bye());
        break;
      }
      if (req.kind == MessageKind::hello) {
        if (req.version != kProtocolVersion) {
          reply(Message::error(error_code::version_mismatch,
                               "server speaks protocol " +
                                   std::to_string(kProtocolVersion)));
          break;
        }
        greeted = true;
        reply(Message::spec_of(env_.spec()));
        continue;
      }
      if (!greeted) {
        reply(Message::error(error_code::no_handshake, "send hello first"));
        continue;
      }

      try {
        switch (req.kind) {
          case MessageKind::reset:
            reply(Message::observation(env_.reset()));
            has_reset = true;
            break;
          case MessageKind::step:
            if (!has_reset) {
              reply(Message::error(error_code::not_reset, "reset before stepping"));
              break;
            }
            reply(Message::result(env_.step(req.action)));
            break;
          default:
            reply(Message::error(error_code::unexpected_kind,
                                 std::string("'") + to_string(req.kind) +
                                     "' is not a request"));
        }
      } catch (const StateError& e) {
        reply(Message::error(error_code::not_reset, e.what()));
      } catch (const InputError& e) {
        reply(Message::error(error_code::invalid_action, e.what()));
      } catch (const ConnectionError&) {
        throw;
      } catch (const Error& e) {
        reply(Message::error(error_code::env_failure, e.what()));
      }
    }
  } catch (const ConnectionError&) {
    // Peer vanished mid-reply; the session is over either way.
  }

  try {
    env_.reset();
  } catch (const Error&) {
    // A broken environment surfaces on the next client's reset.
  }
  ++sessions_;
}

void EnvServer::serve(TcpListener& listener) {
  while (!stop_.load()) {
    if (opts_.max_sessions != 0 && sessions_.load() >= opts_.max_sessions) return;
    auto channel = listener.accept(opts_.poll_interval);
    if (!channel) continue;
    serve_session(*channel);
  }
}

void serve_env(Environment& env, const std::string& listen, ServerOptions opts) {
  EnvServer server(env, opts);
  if (listen == "stdio") {
    LineChannel channel(STDIN_FILENO, STDOUT_FILENO, false);
    server.serve_session(channel);
    return;
  }
  TcpListener listener(listen);
  server.serve(listener);
}

}  // namespace jetrl::bridge
