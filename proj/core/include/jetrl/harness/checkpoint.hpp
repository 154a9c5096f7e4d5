#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jetrl/nn/adam.hpp"
#include "jetrl/rl/agent.hpp"

namespace jetrl::harness {

inline constexpr int kCheckpointFormatVersion = 1;

/// Snapshot of a trained agent: configuration, both networks, optimizer
/// state, counters and random-stream states. The replay memory is not
/// saved; a restored agent continues with an empty buffer.
struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  rl::AgentConfig agent;
  std::size_t obs_dim = 0;
  std::size_t n_actions = 0;
  std::uint64_t seed = 0;
  std::vector<double> online;  // flat; dueling layout is trunk | value | advantage
  std::vector<double> target;
  nn::AdamState adam;
  std::uint64_t env_steps = 0;
  std::uint64_t learner_steps = 0;
  std::uint64_t skipped_updates = 0;
  std::string action_rng;
  std::string replay_rng;

  bool operator==(const Checkpoint&) const = default;
};

Checkpoint capture(const rl::Agent& agent, std::uint64_t seed);

/// Rebuilds an agent whose networks, optimizer, counters and random streams
/// match the checkpoint. Throws FormatError if the stored parameter counts
/// do not fit the stored architecture.
rl::Agent restore(const Checkpoint& ckpt);

/// Deterministic JSON text; to_json(from_json(s)) == s for any s produced
/// by to_json.
std::string to_json(const Checkpoint& ckpt);
/// Throws FormatError for malformed or truncated text, missing fields or an
/// unsupported format_version.
Checkpoint from_json(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace jetrl::harness
