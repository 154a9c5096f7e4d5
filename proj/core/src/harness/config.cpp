#include "jetrl/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <type_traits>

#include "jetrl/errors.hpp"

namespace jetrl::harness {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>)
      out += fmt(v[i]);
    else if constexpr (std::is_same_v<T, std::string>)
      out += v[i];
    else
      out += std::to_string(v[i]);
  }
  return out;
}

/// Reads typed keys from one section and remembers which keys were used so
/// that leftovers (typos) can be reported.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  void read(const char* key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }
  void read(const char* key, double& out) {
    if (auto v = raw(key)) out = to_double(key, *v);
  }
  template <class T>
    requires std::is_unsigned_v<T> && (!std::is_same_v<T, bool>)
  void read(const char* key, T& out) {
    if (auto v = raw(key)) out = to_unsigned<T>(key, *v);
  }
  void read(const char* key, bool& out) {
    if (auto v = raw(key)) {
      std::string s = *v;
      for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (s == "true" || s == "yes" || s == "1" || s == "on") out = true;
      else if (s == "false" || s == "no" || s == "0" || s == "off") out = false;
      else fail(key, *v, "a boolean");
    }
  }
  template <class T>
  void read_list(const char* key, std::vector<T>& out) {
    auto v = raw(key);
    if (!v) return;
    out.clear();
    for (const auto& item : split_list(*v)) {
      if constexpr (std::is_same_v<T, double>) out.push_back(to_double(key, item));
      else if constexpr (std::is_same_v<T, std::string>) out.push_back(item);
      else out.push_back(to_unsigned<T>(key, item));
    }
  }

  std::optional<std::string> raw(const char* key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    const auto child = tree_->get_child_optional(key);
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  void check_unused() const {
    if (!tree_) return;
    for (const auto& [key, _] : *tree_)
      if (!used_.count(key))
        throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
  }

 private:
  [[noreturn]] void fail(const char* key, const std::string& v, const char* what) const {
    throw ConfigError("[" + name_ + "] " + key + " = '" + v + "' is not " + what);
  }
  double to_double(const char* key, const std::string& v) const {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
      fail(key, v, "a finite number");
    return out;
  }
  template <class T>
  T to_unsigned(const char* key, const std::string& v) const {
    T out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail(key, v, "a non-negative integer");
    return out;
  }

  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

const pt::ptree* section(const pt::ptree& root, const char* name) {
  const auto child = root.get_child_optional(name);
  return child ? &*child : nullptr;
}

}  // namespace

void RunConfig::validate() const {
  if (name.empty()) throw ConfigError("run name must not be empty");
  if (name.find_first_of("/\\") != std::string::npos)
    throw ConfigError("run name must not contain path separators");
  if (!(eval_duration > 0.0)) throw ConfigError("eval_duration must be positive");
  if (!(eps_decay_fraction > 0.0 && eps_decay_fraction <= 1.0))
    throw ConfigError("eps_decay_fraction must lie in (0, 1]");
  if (!(temp_scale > 0.0)) throw ConfigError("temp_scale must be positive");
  env.validate();
  agent.validate();
  if (sweep.seeds.empty()) throw ConfigError("sweep needs at least one seed");
  for (const auto& v : sweep.variants) {
    RunConfig probe;
    apply_variant_label(probe, v);
  }
}

RunConfig parse_config(const std::string& ini_text) {
  pt::ptree root;
  try {
    std::istringstream in(ini_text);
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  for (const auto& [name, child] : root) {
    if (name != "run" && name != "env" && name != "agent" && name != "sweep")
      throw ConfigError("unknown config section [" + name + "]");
    if (child.empty() && !child.data().empty())
      throw ConfigError("key '" + name + "' is outside any section");
  }

  RunConfig cfg;

  Section run(section(root, "run"), "run");
  std::size_t version = kConfigFormatVersion;
  run.read("format_version", version);
  if (version != static_cast<std::size_t>(kConfigFormatVersion))
    throw ConfigError("config format_version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kConfigFormatVersion) + ")");
  run.read("name", cfg.name);
  run.read("seed", cfg.seed);
  run.read("n_episodes", cfg.n_episodes);
  run.read("eval_duration", cfg.eval_duration);
  run.read("output_dir", cfg.output_dir);
  run.check_unused();

  Section env(section(root, "env"), "env");
  auto& e = cfg.env;
  env.read("episode_duration", e.episode_duration);
  env.read("dt", e.dt);
  env.read("decision_interval", e.decision_interval);
  env.read("n_actions", e.n_actions);
  env.read("nx", e.nx);
  env.read("ny", e.ny);
  env.read("reward_band", e.reward_band);
  env.read("n_probes", e.probes.n_probes);
  env.read("probe_offset", e.probes.offset);
  env.read_list("probe_x", e.probes.x_positions);
  if (auto q = env.raw("heat_flux"); q && *q != "auto") {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(q->data(), q->data() + q->size(), v);
    if (ec != std::errc() || p != q->data() + q->size() || !std::isfinite(v) || v < 0.0)
      throw ConfigError("[env] heat_flux = '" + *q + "' is not 'auto' or a flux >= 0");
    e.props.q_flux = v;
  }
  env.read("jet_diameter", e.props.d);
  env.read("nozzle_distance", e.props.H_over_d);
  env.read("plate_length", e.props.plate_len_over_d);
  env.read("V_inf", e.props.V_inf);
  env.read("T_inf", e.props.T_inf);
  env.read("T_d", e.props.T_d);
  env.read("rho", e.props.rho);
  env.read("mu", e.props.mu);
  env.read("k", e.props.k);
  env.read("cp", e.props.cp);
  env.read("jet_core_half_width", e.jet_shape.core_half_width);
  env.read("wall_jet_peak", e.jet_shape.wall_jet_peak);
  env.read("wall_jet_boost", e.jet_shape.wall_jet_boost);
  env.read("layer_thickness", e.jet_shape.layer_thickness);
  env.check_unused();

  Section agent(section(root, "agent"), "agent");
  auto& a = cfg.agent;
  std::string variant = rl::to_string(a.variant);
  agent.read("variant", variant);
  a.variant = rl::variant_from_string(variant);
  std::string update = "soft";
  agent.read("target_update", update);
  if (update == "soft") a.target_update.kind = rl::TargetUpdate::Kind::soft;
  else if (update == "hard") a.target_update.kind = rl::TargetUpdate::Kind::hard;
  else throw ConfigError("[agent] target_update must be 'soft' or 'hard'");
  agent.read("tau", a.target_update.tau);
  agent.read("target_interval", a.target_update.interval);
  agent.read("gamma", a.gamma);
  agent.read("batch_size", a.batch_size);
  agent.read("learn_start", a.learn_start);
  agent.read("replay_capacity", a.replay_capacity);
  agent.read("learning_rate", a.adam.lr);
  agent.read("adam_beta1", a.adam.beta1);
  agent.read("adam_beta2", a.adam.beta2);
  agent.read("adam_eps", a.adam.eps_hat);
  agent.read("grad_clip", a.grad_clip);
  agent.read_list("hidden", a.hidden);
  agent.read("stream_hidden", a.stream_hidden);
  agent.read("eps_start", a.epsilon.eps_start);
  agent.read("eps_end", a.epsilon.eps_end);
  agent.read("eps_decay_fraction", cfg.eps_decay_fraction);
  agent.read("time_limit_terminal", a.time_limit_terminal);
  agent.read("temp_scale", cfg.temp_scale);
  agent.check_unused();

  Section sweep(section(root, "sweep"), "sweep");
  sweep.read_list("seeds", cfg.sweep.seeds);
  sweep.read_list("layouts", cfg.sweep.layouts);
  sweep.read_list("episodes", cfg.sweep.episodes);
  sweep.read_list("variants", cfg.sweep.variants);
  sweep.check_unused();

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_ini(const RunConfig& cfg) {
  const auto& e = cfg.env;
  const auto& a = cfg.agent;
  std::ostringstream o;
  o << "[run]\n"
    << "format_version = " << kConfigFormatVersion << "\n"
    << "name = " << cfg.name << "\n"
    << "seed = " << cfg.seed << "\n"
    << "n_episodes = " << cfg.n_episodes << "\n"
    << "eval_duration = " << fmt(cfg.eval_duration) << "\n"
    << "output_dir = " << cfg.output_dir << "\n\n";
  o << "[env]\n"
    << "episode_duration = " << fmt(e.episode_duration) << "\n"
    << "dt = " << fmt(e.dt) << "\n"
    << "decision_interval = " << e.decision_interval << "\n"
    << "n_actions = " << e.n_actions << "\n"
    << "nx = " << e.nx << "\n"
    << "ny = " << e.ny << "\n"
    << "reward_band = " << fmt(e.reward_band) << "\n"
    << "n_probes = " << e.probes.n_probes << "\n"
    << "probe_offset = " << fmt(e.probes.offset) << "\n";
  if (!e.probes.x_positions.empty())
    o << "probe_x = " << join(e.probes.x_positions) << "\n";
  o << "heat_flux = " << (e.props.q_flux > 0.0 ? fmt(e.props.q_flux) : "auto") << "\n"
    << "jet_diameter = " << fmt(e.props.d) << "\n"
    << "nozzle_distance = " << fmt(e.props.H_over_d) << "\n"
    << "plate_length = " << fmt(e.props.plate_len_over_d) << "\n"
    << "V_inf = " << fmt(e.props.V_inf) << "\n"
    << "T_inf = " << fmt(e.props.T_inf) << "\n"
    << "T_d = " << fmt(e.props.T_d) << "\n"
    << "rho = " << fmt(e.props.rho) << "\n"
    << "mu = " << fmt(e.props.mu) << "\n"
    << "k = " << fmt(e.props.k) << "\n"
    << "cp = " << fmt(e.props.cp) << "\n"
    << "jet_core_half_width = " << fmt(e.jet_shape.core_half_width) << "\n"
    << "wall_jet_peak = " << fmt(e.jet_shape.wall_jet_peak) << "\n"
    << "wall_jet_boost = " << fmt(e.jet_shape.wall_jet_boost) << "\n"
    << "layer_thickness = " << fmt(e.jet_shape.layer_thickness) << "\n\n";
  o << "[agent]\n"
    << "variant = " << rl::to_string(a.variant) << "\n"
    << "target_update = "
    << (a.target_update.kind == rl::TargetUpdate::Kind::soft ? "soft" : "hard") << "\n"
    << "tau = " << fmt(a.target_update.tau) << "\n"
    << "target_interval = " << a.target_update.interval << "\n"
    << "gamma = " << fmt(a.gamma) << "\n"
    << "batch_size = " << a.batch_size << "\n"
    << "learn_start = " << a.learn_start << "\n"
    << "replay_capacity = " << a.replay_capacity << "\n"
    << "learning_rate = " << fmt(a.adam.lr) << "\n"
    << "adam_beta1 = " << fmt(a.adam.beta1) << "\n"
    << "adam_beta2 = " << fmt(a.adam.beta2) << "\n"
    << "adam_eps = " << fmt(a.adam.eps_hat) << "\n"
    << "grad_clip = " << fmt(a.grad_clip) << "\n"
    << "hidden = " << join(a.hidden) << "\n"
    << "stream_hidden = " << a.stream_hidden << "\n"
    << "eps_start = " << fmt(a.epsilon.eps_start) << "\n"
    << "eps_end = " << fmt(a.epsilon.eps_end) << "\n"
    << "eps_decay_fraction = " << fmt(cfg.eps_decay_fraction) << "\n"
    << "time_limit_terminal = " << (a.time_limit_terminal ? "true" : "false") << "\n"
    << "temp_scale = " << fmt(cfg.temp_scale) << "\n\n";
  o << "[sweep]\n"
    << "seeds = " << join(cfg.sweep.seeds) << "\n"
    << "layouts = " << join(cfg.sweep.layouts) << "\n"
    << "episodes = " << join(cfg.sweep.episodes) << "\n"
    << "variants = " << join(cfg.sweep.variants) << "\n";
  return o.str();
}

std::filesystem::path output_root(const RunConfig& cfg) {
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return cfg.output_dir;
}

rl::AgentConfig prepared_agent_config(const RunConfig& cfg) {
  rl::AgentConfig a = cfg.agent;
  const double planned = static_cast<double>(cfg.n_episodes) *
                         static_cast<double>(cfg.env.decisions_per_episode());
  a.epsilon.decay_steps =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(
                                     cfg.eps_decay_fraction * planned)));

  const std::size_t np = cfg.env.probes.n_probes;
  const double half = 0.5 * static_cast<double>(cfg.env.n_actions - 1);
  a.obs_center.assign(2 * np + 1, 0.0);
  a.obs_scale.assign(2 * np + 1, 1.0);
  for (std::size_t i = 0; i < np; ++i) {
    a.obs_center[i] = 1.0;
    a.obs_scale[i] = cfg.temp_scale / cfg.env.props.T_d;
  }
  a.obs_center[2 * np] = half;
  a.obs_scale[2 * np] = half > 0.0 ? half : 1.0;
  return a;
}

void apply_variant_label(RunConfig& cfg, const std::string& label) {
  auto& a = cfg.agent;
  const double tau = a.target_update.tau;
  const std::uint64_t interval = a.target_update.interval;
  if (label == "vanilla") {
    a.variant = rl::Variant::vanilla;
    a.target_update = rl::TargetUpdate::hard(interval);
  } else if (label == "double-soft") {
    a.variant = rl::Variant::double_dqn;
    a.target_update = rl::TargetUpdate::soft(tau);
  } else if (label == "double-hard") {
    a.variant = rl::Variant::double_dqn;
    a.target_update = rl::TargetUpdate::hard(interval);
  } else if (label == "duel") {
    a.variant = rl::Variant::duel;
    a.target_update = rl::TargetUpdate::soft(tau);
  } else if (label == "double-duel") {
    a.variant = rl::Variant::double_duel;
    a.target_update = rl::TargetUpdate::soft(tau);
  } else {
    throw ConfigError("unknown variant label '" + label +
                      "' (expected vanilla, double-soft, double-hard, duel or double-duel)");
  }
  a.target_update.tau = tau;
  a.target_update.interval = interval;
}

std::string variant_label(const rl::AgentConfig& a) {
  const bool soft = a.target_update.kind == rl::TargetUpdate::Kind::soft;
  switch (a.variant) {
    case rl::Variant::vanilla: return soft ? "vanilla-soft" : "vanilla";
    case rl::Variant::double_dqn: return soft ? "double-soft" : "double-hard";
    case rl::Variant::duel: return soft ? "duel" : "duel-hard";
    case rl::Variant::double_duel: return soft ? "double-duel" : "double-duel-hard";
  }
  return "unknown";
}

}  // namespace jetrl::harness
