#pragma once

#include <string>

#include "jetrl/bridge/environment.hpp"
#include "jetrl/bridge/transport.hpp"

namespace jetrl::bridge {

struct RemoteOptions {
  Millis timeout = Millis(60'000);  // per request; CFD steps are slow
  int protocol_version = kProtocolVersion;
};

/// Client handle for an environment served by EnvServer. Calls block until
/// the response arrives. Not shareable across concurrent callers.
///
/// Errors: handshake failure or version mismatch -> ConnectionError;
/// timeout, disconnect or a server-side failure during reset/step ->
/// StepError; server-reported invalid action -> InputError; step before
/// reset or after the episode ended -> StateError.
class RemoteEnv : public Environment {
 public:
  /// Performs the hello -> spec handshake on `channel`.
  explicit RemoteEnv(LineChannel channel, RemoteOptions opts = {});
  ~RemoteEnv() override;

  static RemoteEnv connect(const std::string& address, RemoteOptions opts = {});

  RemoteEnv(RemoteEnv&&) = default;

  EnvSpec spec() const override { return spec_; }
  std::vector<double> reset() override;
  StepResult step(std::size_t action) override;

  /// Sends bye and closes the channel. Idempotent.
  void close();

 private:
  struct Reply;
  Reply request(const std::string& line, const char* what);

  LineChannel channel_;
  RemoteOptions opts_;
  EnvSpec spec_;
  bool broken_ = false;
};

}  // namespace jetrl::bridge
