#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jetrl/nn/adam.hpp"
#include "jetrl/nn/q_network.hpp"
#include "jetrl/random.hpp"
#include "jetrl/rl/policy.hpp"
#include "jetrl/rl/replay_buffer.hpp"
#include "jetrl/rl/transition.hpp"

namespace jetrl::rl {

enum class Variant { vanilla, double_dqn, duel, double_duel };

const char* to_string(Variant v) noexcept;
Variant variant_from_string(std::string_view name);

inline bool uses_double_targets(Variant v) {
  return v == Variant::double_dqn || v == Variant::double_duel;
}
inline bool uses_dueling_head(Variant v) {
  return v == Variant::duel || v == Variant::double_duel;
}

struct TargetUpdate {
  enum class Kind { hard, soft };
  Kind kind = Kind::soft;
  std::uint64_t interval = 1000;  // learner steps between hard copies
  double tau = 0.001;             // soft-update weight

  static TargetUpdate hard(std::uint64_t interval) {
    return {Kind::hard, interval, 0.001};
  }
  static TargetUpdate soft(double tau) { return {Kind::soft, 1000, tau}; }

  bool operator==(const TargetUpdate&) const = default;
};

struct AgentConfig {
  double gamma = 0.99;
  Variant variant = Variant::double_dqn;
  TargetUpdate target_update = TargetUpdate::soft(0.001);
  std::size_t batch_size = 64;
  std::size_t learn_start = 1000;
  std::size_t replay_capacity = 50'000;
  nn::AdamConfig adam{};
  double grad_clip = 10.0;
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t stream_hidden = 32;
  EpsilonSchedule epsilon{1.0, 0.05, 30'000};
  /// Time-limit episode ends bootstrap like any other step unless set.
  bool time_limit_terminal = false;
  /// Network input = (observation - obs_center) / obs_scale, elementwise.
  /// Empty vectors mean identity.
  std::vector<double> obs_center;
  std::vector<double> obs_scale;

  void validate() const;
  bool operator==(const AgentConfig&) const = default;
};

struct LearnStats {
  double loss = 0.0;
  double grad_norm = 0.0;
};

/// Online/target Q-networks, optimizer, replay memory and the random
/// streams that drive exploration and mini-batch sampling.
class Agent {
 public:
  Agent(AgentConfig cfg, std::size_t obs_dim, std::size_t n_actions,
        std::uint64_t seed);

  const AgentConfig& config() const { return cfg_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t n_actions() const { return n_actions_; }

  std::vector<double> scale_observation(std::span<const double> obs) const;
  std::vector<double> q_values(std::span<const double> obs) const;

  /// Epsilon-greedy action at exploration rate `eps`.
  std::size_t act(std::span<const double> obs, double eps);
  std::size_t greedy_action(std::span<const double> obs) const;

  /// Stores (obs, a, r, obs_next); `time_limit` marks an episode that ended
  /// by the clock rather than a true terminal state.
  void remember(std::span<const double> obs, std::size_t a, double r,
                std::span<const double> obs_next, bool terminal,
                bool time_limit = false);

  bool ready_to_learn() const;

  /// One gradient step on a sampled mini-batch followed by the configured
  /// target update. Returns nullopt (and counts a skipped update) when the
  /// loss or gradient is non-finite. Throws StateError before learn_start.
  std::optional<LearnStats> learn();

  const nn::QNetwork& online() const { return online_; }
  const nn::QNetwork& target() const { return target_; }
  nn::QNetwork& mutable_online() { return online_; }
  nn::QNetwork& mutable_target() { return target_; }
  const nn::AdamState& adam() const { return adam_; }
  nn::AdamState& mutable_adam() { return adam_; }
  const ReplayBuffer& replay() const { return replay_; }

  std::uint64_t env_steps() const { return env_steps_; }
  std::uint64_t learner_steps() const { return learner_steps_; }
  std::uint64_t skipped_updates() const { return skipped_updates_; }
  void set_counters(std::uint64_t env_steps, std::uint64_t learner_steps,
                    std::uint64_t skipped);

  Rng& action_rng() { return action_rng_; }
  Rng& replay_rng() { return replay_rng_; }
  const Rng& action_rng() const { return action_rng_; }
  const Rng& replay_rng() const { return replay_rng_; }

 private:
  AgentConfig cfg_;
  std::size_t obs_dim_;
  std::size_t n_actions_;
  nn::QNetwork online_;
  nn::QNetwork target_;
  nn::AdamState adam_;
  ReplayBuffer replay_;
  Rng action_rng_;
  Rng replay_rng_;
  std::uint64_t env_steps_ = 0;
  std::uint64_t learner_steps_ = 0;
  std::uint64_t skipped_updates_ = 0;
};

}  // namespace jetrl::rl
