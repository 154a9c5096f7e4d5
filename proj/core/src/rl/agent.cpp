#include "jetrl/rl/agent.hpp"

#include <cmath>
#include <string>

#include "jetrl/errors.hpp"
#include "jetrl/rl/td_learning.hpp"

namespace jetrl::rl {

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::vanilla: return "vanilla";
    case Variant::double_dqn: return "double";
    case Variant::duel: return "duel";
    case Variant::double_duel: return "double_duel";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  if (name == "vanilla") return Variant::vanilla;
  if (name == "double") return Variant::double_dqn;
  if (name == "duel") return Variant::duel;
  if (name == "double_duel") return Variant::double_duel;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (target_update.kind == TargetUpdate::Kind::soft &&
      !(target_update.tau > 0.0 && target_update.tau <= 1.0))
    throw ConfigError("soft-update tau must lie in (0, 1]");
  if (target_update.kind == TargetUpdate::Kind::hard && target_update.interval < 1)
    throw ConfigError("hard-update interval must be at least 1");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (replay_capacity == 0) throw ConfigError("replay_capacity must be positive");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 &&
        adam.beta2 < 1.0))
    throw ConfigError("Adam betas must lie in [0, 1)");
  if (!(adam.eps_hat > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (hidden.empty()) throw ConfigError("at least one hidden layer is required");
  for (auto w : hidden)
    if (w == 0) throw ConfigError("hidden widths must be positive");
  if (stream_hidden == 0) throw ConfigError("stream_hidden must be positive");
  epsilon.validate();
  if (obs_center.size() != obs_scale.size())
    throw ConfigError("obs_center and obs_scale differ in length");
  for (double s : obs_scale)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ConfigError("obs_scale entries must be positive");
}

Agent::Agent(AgentConfig cfg, std::size_t obs_dim, std::size_t n_actions,
             std::uint64_t seed)
    : cfg_(std::move(cfg)),
      obs_dim_(obs_dim),
      n_actions_(n_actions),
      replay_(cfg_.replay_capacity),
      action_rng_(derive_seed(seed, 2)),
      replay_rng_(derive_seed(seed, 3)) {
  cfg_.validate();
  if (obs_dim == 0 || n_actions == 0)
    throw ConfigError("agent needs positive observation and action sizes");
  if (!cfg_.obs_center.empty() && cfg_.obs_center.size() != obs_dim)
    throw ConfigError("obs_center length " + std::to_string(cfg_.obs_center.size()) +
                      " does not match observation size " + std::to_string(obs_dim));
  const std::uint64_t net_seed = derive_seed(seed, 1);
  online_ = uses_dueling_head(cfg_.variant)
                ? nn::QNetwork::dueling(obs_dim, cfg_.hidden, cfg_.stream_hidden,
                                        n_actions, net_seed)
                : nn::QNetwork::plain(obs_dim, cfg_.hidden, n_actions, net_seed);
  target_ = online_;
  adam_ = nn::AdamState(online_.param_count(), cfg_.adam);
}

std::vector<double> Agent::scale_observation(std::span<const double> obs) const {
  if (obs.size() != obs_dim_)
    throw InputError("observation has size " + std::to_string(obs.size()) +
                     ", expected " + std::to_string(obs_dim_));
  std::vector<double> x(obs.begin(), obs.end());
  if (!cfg_.obs_center.empty())
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = (x[i] - cfg_.obs_center[i]) / cfg_.obs_scale[i];
  return x;
}

std::vector<double> Agent::q_values(std::span<const double> obs) const {
  return online_.q_values(scale_observation(obs));
}

std::size_t Agent::act(std::span<const double> obs, double eps) {
  return select_action(q_values(obs), eps, action_rng_);
}

std::size_t Agent::greedy_action(std::span<const double> obs) const {
  return argmax(q_values(obs));
}

void Agent::remember(std::span<const double> obs, std::size_t a, double r,
                     std::span<const double> obs_next, bool terminal,
                     bool time_limit) {
  Transition t;
  t.s = scale_observation(obs);
  t.a = a;
  t.r = r;
  t.s_next = scale_observation(obs_next);
  const bool cut = terminal || (time_limit && cfg_.time_limit_terminal);
  t.gamma_next = cut ? 0.0 : cfg_.gamma;
  t.done = t.gamma_next == 0.0;
  validate(t, n_actions_);
  replay_.push(std::move(t));
  ++env_steps_;
}

bool Agent::ready_to_learn() const {
  const std::size_t n = replay_.size();
  return n > 0 && n >= cfg_.learn_start;
}

std::optional<LearnStats> Agent::learn() {
  if (!ready_to_learn())
    throw StateError("learn() called before learn_start transitions");
  const auto batch = replay_.sample(cfg_.batch_size, replay_rng_);
  try {
    const auto y = uses_double_targets(cfg_.variant)
                       ? td_target_double(batch, online_, target_)
                       : td_target_vanilla(batch, target_);
    const auto lg = q_loss_and_grad(batch, y, online_, cfg_.grad_clip);
    auto params = online_.params();
    nn::AdamState next_adam = adam_;
    nn::adam_step(params, lg.grads, next_adam);
    for (double p : params)
      if (!std::isfinite(p)) throw NumericError("parameter update diverged");
    online_.set_params(params);
    adam_ = std::move(next_adam);
    ++learner_steps_;
    if (cfg_.target_update.kind == TargetUpdate::Kind::soft)
      soft_update(target_, online_, cfg_.target_update.tau);
    else if (learner_steps_ % cfg_.target_update.interval == 0)
      hard_update(target_, online_);
    return LearnStats{lg.loss, lg.grad_norm};
  } catch (const NumericError&) {
    ++skipped_updates_;
  }
  return std::nullopt;
}

void Agent::set_counters(std::uint64_t env_steps, std::uint64_t learner_steps,
                         std::uint64_t skipped) {
  env_steps_ = env_steps;
  learner_steps_ = learner_steps;
  skipped_updates_ = skipped;
}

}  // namespace jetrl::rl
