// jetrl: train, evaluate and compare DQN controllers on the impinging-jet
// surrogate, or serve the surrogate to an external client.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "jetrl/bridge/server.hpp"
#include "jetrl/errors.hpp"
#include "jetrl/harness/config.hpp"
#include "jetrl/harness/experiment.hpp"
#include "jetrl/thermal/calibration.hpp"
#include "jetrl/thermal/thermal_env.hpp"

namespace fs = std::filesystem;
using namespace jetrl;

namespace {

constexpr int kExitAborted = 2;

harness::RunConfig load(const std::string& path) {
  return path.empty() ? harness::RunConfig{} : harness::load_config(path);
}

void print_summary(const char* what, const harness::RolloutSummary& s) {
  std::printf("%s: %zu decisions, normalized reward %.2f, in-band %.3f, "
              "mean T_surf %.3f K (T* %.4f), final T_surf %.3f K\n",
              what, s.decisions, s.normalized_reward, s.in_band_fraction, s.mean_t_surf,
              s.mean_t_star, s.final_t_surf);
}

int cmd_train(const std::string& config, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> episodes, bool quiet) {
  harness::RunConfig cfg = load(config);
  if (seed) cfg.seed = *seed;
  if (episodes) cfg.n_episodes = *episodes;
  cfg.validate();

  const auto env = harness::resolved_env(cfg);
  if (!quiet)
    std::printf("run '%s' seed %llu: %s, %zu episodes, heat flux %.6g W/m^2\n",
                cfg.name.c_str(), static_cast<unsigned long long>(cfg.seed),
                harness::variant_label(cfg.agent).c_str(), cfg.n_episodes, env.props.q_flux);

  harness::TrainOptions opts;
  if (!quiet)
    opts.on_episode = [](const harness::MetricsRow& m) {
      std::printf("episode %4zu  reward %7.2f  in-band %.3f  eps %.3f  T_surf %.2f K%s\n",
                  m.episode, m.normalized_reward, m.in_band_fraction, m.epsilon,
                  m.mean_t_surf, m.aborted ? "  [aborted]" : "");
      std::fflush(stdout);
    };
  const auto result = harness::train(cfg, opts);
  std::printf("wrote %s\n", result.run_dir.string().c_str());
  if (result.run_aborted) {
    std::fprintf(stderr, "run aborted: %s\n", result.abort_reason.c_str());
    return kExitAborted;
  }
  for (const auto& m : result.metrics)
    if (m.aborted) return kExitAborted;
  return 0;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& config, std::string out) {
  const harness::RunConfig cfg = load(config);
  const harness::Checkpoint ckpt = harness::load_checkpoint(ckpt_path);
  if (out.empty()) out = (fs::path(ckpt_path).parent_path() / "eval").string();
  const auto r = harness::evaluate(ckpt, cfg, fs::path(out));
  print_summary("greedy evaluation", r.summary);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_baseline(std::size_t level, const std::string& config, std::string out) {
  const harness::RunConfig cfg = load(config);
  if (out.empty())
    out = (harness::output_root(cfg) / cfg.name / ("baseline_" + std::to_string(level))).string();
  const auto r = harness::run_baseline(level, cfg, fs::path(out));
  const auto env = harness::resolved_env(cfg);
  std::printf("level %zu: jet velocity %.4g m/s\n", level, env.action_velocity(level));
  print_summary("constant action", r.summary);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_sweep(const std::string& axis_name, const std::string& config) {
  const harness::RunConfig cfg = load(config);
  const auto axis = harness::sweep_axis_from_string(axis_name);
  bool aborted = false;
  harness::sweep(cfg, axis, true, [&](const harness::SweepCell& c) {
    const auto& ms = c.train.metrics;
    std::printf("%s=%s seed %llu: final reward %.2f, greedy in-band %.3f%s\n", axis_name.c_str(),
                c.axis_value.c_str(), static_cast<unsigned long long>(c.seed),
                ms.empty() ? 0.0 : ms.back().normalized_reward, c.eval.in_band_fraction,
                c.train.run_aborted ? " [aborted]" : "");
    std::fflush(stdout);
    aborted = aborted || c.train.run_aborted;
  });
  std::printf("wrote %s\n",
              (harness::output_root(cfg) / cfg.name / ("sweep_" + axis_name)).string().c_str());
  return aborted ? kExitAborted : 0;
}

int cmd_serve(const std::string& env_name, const std::string& listen, const std::string& config,
              std::size_t max_sessions) {
  if (env_name != "thermal") throw ConfigError("unknown environment '" + env_name + "'");
  const harness::RunConfig cfg = load(config);
  thermal::ThermalEnv env(harness::resolved_env(cfg));
  bridge::ServerOptions opts;
  opts.max_sessions = max_sessions;
  if (listen != "stdio")
    std::fprintf(stderr, "serving thermal environment on %s\n", listen.c_str());
  bridge::serve_env(env, listen, opts);
  return 0;
}

int cmd_calibrate(const std::string& config) {
  harness::RunConfig cfg = load(config);
  cfg.env.props.q_flux = 0.0;
  const auto r = thermal::calibrate_heat_flux(cfg.env);
  std::printf("heat flux %.17g W/m^2 (steady T_surf %.6f K at level %zu, %zu iterations)\n",
              r.q_flux, r.steady_t_surf, r.reference_action, r.iterations);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);

  CLI::App app{"Deep Q-learning control of an impinging-jet cooled plate"};
  app.require_subcommand(1);

  std::string config;
  const auto add_config = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--config", config, "INI run configuration");
    opt->check(CLI::ExistingFile);
    if (required) opt->required();
  };

  auto* train = app.add_subcommand("train", "Train an agent and write metrics + checkpoint");
  add_config(train, false);
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  bool quiet = false;
  train->add_option("--seed", seed, "Override [run] seed");
  train->add_option("--episodes", episodes, "Override [run] n_episodes");
  train->add_flag("--quiet", quiet, "Only print the output directory");

  auto* evaluate = app.add_subcommand("evaluate", "Greedy rollout of a checkpoint");
  std::string ckpt, out;
  evaluate->add_option("--ckpt", ckpt, "checkpoint.json")->required()->check(CLI::ExistingFile);
  add_config(evaluate, false);
  evaluate->add_option("--out", out, "Output directory (default: <ckpt dir>/eval)");

  auto* baseline = app.add_subcommand("baseline", "Hold one jet velocity level");
  std::size_t level = 0;
  baseline->add_option("--level", level, "Velocity level, 0 = slowest")->required();
  add_config(baseline, false);
  baseline->add_option("--out", out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Train + evaluate across one axis and all seeds");
  std::string axis;
  sweep->add_option("--axis", axis, "layout, episodes or variant")
      ->required()
      ->check(CLI::IsMember({"layout", "episodes", "variant"}));
  add_config(sweep, false);

  auto* serve = app.add_subcommand("serve-env", "Serve an environment over JSON lines");
  std::string env_name = "thermal", listen;
  std::size_t max_sessions = 0;
  serve->add_option("--env", env_name, "Environment name")->check(CLI::IsMember({"thermal"}));
  serve->add_option("--listen", listen, "host:port or stdio")->required();
  serve->add_option("--max-sessions", max_sessions, "Exit after this many clients (0 = never)");
  add_config(serve, false);

  auto* calibrate = app.add_subcommand("calibrate", "Print the calibrated plate heat flux");
  add_config(calibrate, false);

  auto* show = app.add_subcommand("show-config", "Print the effective configuration as INI");
  add_config(show, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config, seed, episodes, quiet);
    if (*evaluate) return cmd_evaluate(ckpt, config, out);
    if (*baseline) return cmd_baseline(level, config, out);
    if (*sweep) return cmd_sweep(axis, config);
    if (*serve) return cmd_serve(env_name, listen, config, max_sessions);
    if (*calibrate) return cmd_calibrate(config);
    if (*show) {
      std::fputs(harness::to_ini(load(config)).c_str(), stdout);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
