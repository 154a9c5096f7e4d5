#pragma once

#include <cstddef>
#include <vector>

namespace jetrl::bridge {

inline constexpr int kProtocolVersion = 1;

struct EnvSpec {
  std::size_t obs_dim = 0;
  std::size_t n_actions = 0;
  std::size_t max_decisions_per_episode = 0;
  int protocol_version = kProtocolVersion;

  /// Throws ConfigError unless every field is positive.
  void validate() const;
  bool operator==(const EnvSpec&) const = default;
};

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;

  bool operator==(const StepResult&) const = default;
};

/// reset/step contract shared by local simulators and remote handles.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvSpec spec() const = 0;
  virtual std::vector<double> reset() = 0;
  /// Throws InputError for an invalid action and StateError when called
  /// before reset() or after the episode finished.
  virtual StepResult step(std::size_t action) = 0;
};

}  // namespace jetrl::bridge
