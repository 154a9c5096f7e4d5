#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jetrl/rl/agent.hpp"
#include "jetrl/thermal/thermal_env.hpp"

namespace jetrl::harness {

inline constexpr int kConfigFormatVersion = 1;

/// Environment variable that, when set, replaces [run] output_dir.
inline constexpr const char* kOutputRootEnv = "JETRL_OUTPUT_ROOT";

struct SweepConfig {
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<double> layouts = {0.001, 0.005, 0.010};  // probe offsets, m
  std::vector<std::size_t> episodes = {50, 100, 150};
  std::vector<std::string> variants = {"vanilla", "double-soft", "double-hard", "duel"};

  bool operator==(const SweepConfig&) const = default;
};

/// Everything that determines a run. `agent.epsilon.decay_steps` and the
/// observation scaler are derived by prepared_agent_config(), not read.
struct RunConfig {
  std::string name = "default";
  std::uint64_t seed = 1;
  std::size_t n_episodes = 100;
  double eval_duration = 100.0;  // s
  std::string output_dir = "runs";

  thermal::EnvConfig env;
  rl::AgentConfig agent;
  double eps_decay_fraction = 0.3;  // of all planned decisions
  double temp_scale = 2.0;          // K; probe temperatures are fed as (T/T_d - 1) * T_d / temp_scale

  SweepConfig sweep;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parses INI text (sections [run], [env], [agent], [sweep]). Missing keys
/// keep their defaults; unknown sections or keys and unparsable values
/// throw ConfigError.
RunConfig parse_config(const std::string& ini_text);
RunConfig load_config(const std::filesystem::path& path);

/// INI text that parse_config() maps back to the same RunConfig.
std::string to_ini(const RunConfig& cfg);

/// Output root: $JETRL_OUTPUT_ROOT if set and non-empty, else cfg.output_dir.
std::filesystem::path output_root(const RunConfig& cfg);

/// The agent configuration actually used for training: epsilon decays over
/// eps_decay_fraction of n_episodes * decisions_per_episode decisions, and
/// the observation scaler centres the probe temperatures on T_d and the
/// action index on the middle level.
rl::AgentConfig prepared_agent_config(const RunConfig& cfg);

/// Applies a variant label: vanilla (hard target copies), double-soft,
/// double-hard, duel (soft), double-duel (soft). Throws ConfigError.
void apply_variant_label(RunConfig& cfg, const std::string& label);
std::string variant_label(const rl::AgentConfig& agent);

}  // namespace jetrl::harness
