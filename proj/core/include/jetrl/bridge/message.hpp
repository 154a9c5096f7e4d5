#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetrl/bridge/environment.hpp"
#include "jetrl/errors.hpp"

namespace jetrl::bridge {

enum class MessageKind { hello, spec, reset, obs, step, result, error, bye };

const char* to_string(MessageKind kind) noexcept;
std::optional<MessageKind> kind_from_string(std::string_view name);

/// Error codes carried by `error` messages.
namespace error_code {
inline constexpr const char* malformed = "malformed";
inline constexpr const char* unknown_kind = "unknown_kind";
inline constexpr const char* unexpected_kind = "unexpected_kind";
inline constexpr const char* no_handshake = "no_handshake";
inline constexpr const char* version_mismatch = "version_mismatch";
inline constexpr const char* not_reset = "not_reset";
inline constexpr const char* invalid_action = "invalid_action";
inline constexpr const char* env_failure = "env_failure";
}  // namespace error_code

/// One protocol message. Only the fields belonging to `kind` travel on the
/// wire:
///   hello  {version}            spec   {obs_dim, n_actions,
///   reset  {}                           max_decisions_per_episode,
///   obs    {obs}                        protocol_version}
///   step   {action}             result {obs, reward, done}
///   error  {code, message}      bye    {}
struct Message {
  MessageKind kind = MessageKind::bye;
  int version = kProtocolVersion;
  EnvSpec spec;
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
  std::size_t action = 0;
  std::string code;
  std::string text;

  static Message hello(int version = kProtocolVersion);
  static Message spec_of(const EnvSpec& spec);
  static Message reset();
  static Message observation(std::vector<double> obs);
  static Message step(std::size_t action);
  static Message result(const StepResult& r);
  static Message error(std::string code, std::string text = {});
  static Message bye();

  bool operator==(const Message&) const;
};

/// Thrown by decode() for a well-formed object whose kind is not in the
/// protocol; the server answers these with `unknown_kind`.
class UnknownKindError : public CodecError {
 public:
  UnknownKindError(const std::string& kind, std::size_t offset)
      : CodecError("unknown message kind '" + kind + "'", offset), kind_(kind) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Single JSON object, no trailing newline. Doubles are written with 17
/// significant digits so decoding restores them exactly. Throws CodecError
/// for non-finite numbers.
std::string encode(const Message& msg);

/// Parses one line (a trailing "\n" or "\r\n" is ignored). Throws CodecError
/// carrying the byte offset of the failure.
Message decode(std::string_view line);

}  // namespace jetrl::bridge
