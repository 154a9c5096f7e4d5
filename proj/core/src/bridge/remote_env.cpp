#include "jetrl/bridge/remote_env.hpp"

#include "jetrl/bridge/message.hpp"
#include "jetrl/errors.hpp"

namespace jetrl::bridge {

struct RemoteEnv::Reply {
  RecvResult::Status status;
  Message msg;
};

RemoteEnv::Reply RemoteEnv::request(const std::string& line, const char* what) {
  if (broken_ || !channel_.is_open())
    throw StepError(std::string(what) + ": remote environment is disconnected");
  try {
    channel_.send_line(line);
    const RecvResult in = channel_.recv_line(opts_.timeout);
    if (in.status != RecvResult::Status::line) {
      // A late reply would desynchronise request/response pairing.
      broken_ = true;
      return {in.status, {}};
    }
    return {in.status, decode(in.line)};
  } catch (const ConnectionError&) {
    broken_ = true;
    return {RecvResult::Status::eof, {}};
  } catch (const CodecError& e) {
    broken_ = true;
    throw StepError(std::string(what) + ": unreadable reply: " + e.what());
  }
}

RemoteEnv::RemoteEnv(LineChannel channel, RemoteOptions opts)
    : channel_(std::move(channel)), opts_(opts) {
  const Reply r = request(encode(Message::hello(opts_.protocol_version)), "hello");
  if (r.status == RecvResult::Status::timeout)
    throw ConnectionError("handshake timed out");
  if (r.status == RecvResult::Status::eof)
    throw ConnectionError("server closed the connection during handshake");
  if (r.msg.kind == MessageKind::error)
    throw ConnectionError("handshake rejected (" + r.msg.code + "): " + r.msg.text);
  if (r.msg.kind != MessageKind::spec)
    throw ConnectionError(std::string("expected spec, got ") + to_string(r.msg.kind));
  if (r.msg.spec.protocol_version != opts_.protocol_version)
    throw ConnectionError("server protocol " +
                          std::to_string(r.msg.spec.protocol_version) +
                          " differs from client protocol " +
                          std::to_string(opts_.protocol_version));
  try {
    r.msg.spec.validate();
  } catch (const ConfigError& e) {
    throw ConnectionError(std::string("server sent an invalid spec: ") + e.what());
  }
  spec_ = r.msg.spec;
}

RemoteEnv::~RemoteEnv() { close(); }

RemoteEnv RemoteEnv::connect(const std::string& address, RemoteOptions opts) {
  return RemoteEnv(tcp_connect(address), opts);
}

void RemoteEnv::close() {
  if (channel_.is_open() && !broken_) {
    try {
      channel_.send_line(encode(Message::bye()));
      channel_.recv_line(Millis(1000));
    } catch (const Error&) {
    }
  }
  channel_.close();
}

namespace {

[[noreturn]] void raise_remote_error(const Message& m, const char* what) {
  const std::string text = std::string(what) + ": " + m.text;
  if (m.code == error_code::invalid_action) throw InputError(text);
  if (m.code == error_code::not_reset) throw StateError(text);
  throw StepError(text + " (" + m.code + ")");
}

void check_status(RecvResult::Status s, const char* what, Millis timeout) {
  if (s == RecvResult::Status::timeout)
    throw StepError(std::string(what) + " timed out after " +
                    std::to_string(timeout.count()) + " ms");
  if (s == RecvResult::Status::eof)
    throw StepError(std::string(what) + ": server disconnected");
}

}  // namespace

std::vector<double> RemoteEnv::reset() {
  Reply r = request(encode(Message::reset()), "reset");
  check_status(r.status, "reset", opts_.timeout);
  if (r.msg.kind == MessageKind::error) raise_remote_error(r.msg, "reset");
  if (r.msg.kind != MessageKind::obs)
    throw StepError(std::string("reset: expected obs, got ") + to_string(r.msg.kind));
  return std::move(r.msg.obs);
}

StepResult RemoteEnv::step(std::size_t action) {
  Reply r = request(encode(Message::step(action)), "step");
  check_status(r.status, "step", opts_.timeout);
  if (r.msg.kind == MessageKind::error) raise_remote_error(r.msg, "step");
  if (r.msg.kind != MessageKind::result)
    throw StepError(std::string("step: expected result, got ") + to_string(r.msg.kind));
  return {std::move(r.msg.obs), r.msg.reward, r.msg.done};
}

}  // namespace jetrl::bridge
