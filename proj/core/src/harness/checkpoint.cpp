#include "jetrl/harness/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "jetrl/errors.hpp"
#include "jetrl/harness/csv.hpp"
#include "json.hpp"

namespace jetrl::harness {

using json = nlohmann::ordered_json;

namespace {

json agent_to_json(const rl::AgentConfig& a) {
  json j;
  j["variant"] = rl::to_string(a.variant);
  j["target_update"] = a.target_update.kind == rl::TargetUpdate::Kind::soft ? "soft" : "hard";
  j["target_interval"] = a.target_update.interval;
  j["tau"] = a.target_update.tau;
  j["gamma"] = a.gamma;
  j["batch_size"] = a.batch_size;
  j["learn_start"] = a.learn_start;
  j["replay_capacity"] = a.replay_capacity;
  j["adam"] = {{"lr", a.adam.lr},
               {"beta1", a.adam.beta1},
               {"beta2", a.adam.beta2},
               {"eps_hat", a.adam.eps_hat}};
  j["grad_clip"] = a.grad_clip;
  j["hidden"] = a.hidden;
  j["stream_hidden"] = a.stream_hidden;
  j["epsilon"] = {{"start", a.epsilon.eps_start},
                  {"end", a.epsilon.eps_end},
                  {"decay_steps", a.epsilon.decay_steps}};
  j["time_limit_terminal"] = a.time_limit_terminal;
  j["obs_center"] = a.obs_center;
  j["obs_scale"] = a.obs_scale;
  return j;
}

rl::AgentConfig agent_from_json(const json& j) {
  rl::AgentConfig a;
  a.variant = rl::variant_from_string(j.at("variant").get<std::string>());
  const auto kind = j.at("target_update").get<std::string>();
  if (kind != "soft" && kind != "hard") throw FormatError("bad target_update '" + kind + "'");
  a.target_update.kind =
      kind == "soft" ? rl::TargetUpdate::Kind::soft : rl::TargetUpdate::Kind::hard;
  a.target_update.interval = j.at("target_interval").get<std::uint64_t>();
  a.target_update.tau = j.at("tau").get<double>();
  a.gamma = j.at("gamma").get<double>();
  a.batch_size = j.at("batch_size").get<std::size_t>();
  a.learn_start = j.at("learn_start").get<std::size_t>();
  a.replay_capacity = j.at("replay_capacity").get<std::size_t>();
  const json& adam = j.at("adam");
  a.adam.lr = adam.at("lr").get<double>();
  a.adam.beta1 = adam.at("beta1").get<double>();
  a.adam.beta2 = adam.at("beta2").get<double>();
  a.adam.eps_hat = adam.at("eps_hat").get<double>();
  a.grad_clip = j.at("grad_clip").get<double>();
  a.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  a.stream_hidden = j.at("stream_hidden").get<std::size_t>();
  const json& eps = j.at("epsilon");
  a.epsilon.eps_start = eps.at("start").get<double>();
  a.epsilon.eps_end = eps.at("end").get<double>();
  a.epsilon.decay_steps = eps.at("decay_steps").get<std::uint64_t>();
  a.time_limit_terminal = j.at("time_limit_terminal").get<bool>();
  a.obs_center = j.at("obs_center").get<std::vector<double>>();
  a.obs_scale = j.at("obs_scale").get<std::vector<double>>();
  return a;
}

json net_to_json(const rl::Agent& agent, const std::vector<double>& params) {
  json j;
  if (agent.online().is_dueling()) {
    const auto& h = agent.online().head();
    j["architecture"] = "dueling";
    j["segments"] = {{"trunk", h.trunk.param_count()},
                     {"value", h.value_stream.param_count()},
                     {"advantage", h.advantage_stream.param_count()}};
  } else {
    j["architecture"] = "plain";
  }
  j["params"] = params;
  return j;
}

std::vector<double> net_from_json(const json& j) {
  const auto arch = j.at("architecture").get<std::string>();
  if (arch != "plain" && arch != "dueling")
    throw FormatError("unknown network architecture '" + arch + "'");
  return j.at("params").get<std::vector<double>>();
}

}  // namespace

Checkpoint capture(const rl::Agent& agent, std::uint64_t seed) {
  Checkpoint c;
  c.agent = agent.config();
  c.obs_dim = agent.obs_dim();
  c.n_actions = agent.n_actions();
  c.seed = seed;
  c.online = agent.online().params();
  c.target = agent.target().params();
  c.adam = agent.adam();
  c.env_steps = agent.env_steps();
  c.learner_steps = agent.learner_steps();
  c.skipped_updates = agent.skipped_updates();
  c.action_rng = serialize_rng(agent.action_rng());
  c.replay_rng = serialize_rng(agent.replay_rng());
  return c;
}

rl::Agent restore(const Checkpoint& c) {
  rl::Agent agent(c.agent, c.obs_dim, c.n_actions, c.seed);
  const std::size_t n = agent.online().param_count();
  if (c.online.size() != n || c.target.size() != n || c.adam.m.size() != n ||
      c.adam.v.size() != n)
    throw FormatError("checkpoint parameter vectors do not match the architecture (" +
                      std::to_string(n) + " parameters expected)");
  try {
    agent.mutable_online().set_params(c.online);
    agent.mutable_target().set_params(c.target);
  } catch (const InputError& e) {
    throw FormatError(std::string("checkpoint parameters rejected: ") + e.what());
  }
  agent.mutable_adam() = c.adam;
  agent.set_counters(c.env_steps, c.learner_steps, c.skipped_updates);
  agent.action_rng() = deserialize_rng(c.action_rng);
  agent.replay_rng() = deserialize_rng(c.replay_rng);
  return agent;
}

std::string to_json(const Checkpoint& c) {
  // Network metadata comes from a shape-only agent so the JSON records the
  // dueling segment sizes without holding a live agent here.
  const rl::Agent shape(c.agent, c.obs_dim, c.n_actions, c.seed);
  json j;
  j["format_version"] = c.format_version;
  j["obs_dim"] = c.obs_dim;
  j["n_actions"] = c.n_actions;
  j["seed"] = c.seed;
  j["agent"] = agent_to_json(c.agent);
  j["online"] = net_to_json(shape, c.online);
  j["target"] = net_to_json(shape, c.target);
  j["adam"] = {{"t", c.adam.t},
               {"lr", c.adam.config.lr},
               {"beta1", c.adam.config.beta1},
               {"beta2", c.adam.config.beta2},
               {"eps_hat", c.adam.config.eps_hat},
               {"m", c.adam.m},
               {"v", c.adam.v}};
  j["counters"] = {{"env_steps", c.env_steps},
                   {"learner_steps", c.learner_steps},
                   {"skipped_updates", c.skipped_updates}};
  j["rng"] = {{"action", c.action_rng}, {"replay", c.replay_rng}};
  return j.dump(1) + "\n";
}

Checkpoint from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  Checkpoint c;
  try {
    c.format_version = j.at("format_version").get<int>();
    if (c.format_version != kCheckpointFormatVersion)
      throw FormatError("checkpoint format_version " + std::to_string(c.format_version) +
                        " is not supported (expected " +
                        std::to_string(kCheckpointFormatVersion) + ")");
    c.obs_dim = j.at("obs_dim").get<std::size_t>();
    c.n_actions = j.at("n_actions").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.agent = agent_from_json(j.at("agent"));
    c.online = net_from_json(j.at("online"));
    c.target = net_from_json(j.at("target"));
    const json& adam = j.at("adam");
    c.adam.t = adam.at("t").get<std::uint64_t>();
    c.adam.config = {adam.at("lr").get<double>(), adam.at("beta1").get<double>(),
                     adam.at("beta2").get<double>(), adam.at("eps_hat").get<double>()};
    c.adam.m = adam.at("m").get<std::vector<double>>();
    c.adam.v = adam.at("v").get<std::vector<double>>();
    const json& counters = j.at("counters");
    c.env_steps = counters.at("env_steps").get<std::uint64_t>();
    c.learner_steps = counters.at("learner_steps").get<std::uint64_t>();
    c.skipped_updates = counters.at("skipped_updates").get<std::uint64_t>();
    c.action_rng = j.at("rng").at("action").get<std::string>();
    c.replay_rng = j.at("rng").at("replay").get<std::string>();
    // Validate the structure now rather than at first use.
    (void)restore(c);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint is incomplete or mistyped: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint holds an invalid setting: ") + e.what());
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  const std::string text = to_json(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw FormatError("write to " + path.string() + " failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace jetrl::harness
