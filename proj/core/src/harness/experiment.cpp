#include "jetrl/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>

#include "jetrl/errors.hpp"
#include "jetrl/harness/csv.hpp"
#include "jetrl/thermal/calibration.hpp"
#include "jetrl/thermal/reward.hpp"
#include "jetrl/thermal/thermal_env.hpp"

namespace jetrl::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path default_run_dir(const RunConfig& cfg) {
  return output_root(cfg) / cfg.name / ("seed_" + std::to_string(cfg.seed));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
}

CsvRow metrics_csv_row(const MetricsRow& m) {
  CsvRow r;
  r.add(static_cast<std::uint64_t>(m.episode))
      .add(m.total_reward)
      .add(m.normalized_reward)
      .add(m.mean_t_surf)
      .add(m.min_t_surf)
      .add(m.max_t_surf)
      .add(m.mean_abs_dv)
      .add(m.in_band_fraction)
      .add(m.epsilon)
      .add(static_cast<std::uint64_t>(m.decisions))
      .add(m.aborted)
      .add(m.skipped_updates);
  return r;
}

void write_summary(const std::filesystem::path& path, const RolloutSummary& s) {
  CsvWriter w(path, {"decisions", "total_reward", "normalized_reward", "in_band_fraction",
                     "mean_t_surf", "final_t_surf", "mean_t_star"});
  w.write(CsvRow()
              .add(static_cast<std::uint64_t>(s.decisions))
              .add(s.total_reward)
              .add(s.normalized_reward)
              .add(s.in_band_fraction)
              .add(s.mean_t_surf)
              .add(s.final_t_surf)
              .add(s.mean_t_star));
}

void write_rollout(const std::filesystem::path& dir, const RolloutResult& r) {
  CsvWriter w(dir / "history.csv", history_header());
  for (const auto& h : r.history)
    w.write(CsvRow()
                .add(h.time)
                .add(static_cast<std::uint64_t>(h.action))
                .add(h.velocity)
                .add(h.t_surf)
                .add(h.t_star)
                .add(h.reward));
  write_summary(dir / "summary.csv", r.summary);
  write_text(dir / "mean_field.csv", r.mean_field.to_csv());
}

/// Runs the environment to its horizon with `policy` choosing actions.
template <class Policy>
RolloutResult rollout(const RunConfig& cfg, Policy&& policy) {
  thermal::EnvConfig ec = resolved_env(cfg);
  ec.episode_duration = cfg.eval_duration;
  thermal::ThermalEnv env(ec);
  const double t_d = ec.props.T_d;

  RolloutResult out;
  std::vector<double> obs = env.reset();
  std::vector<double> field_sum(env.grid().values().size(), 0.0);
  std::size_t in_band = 0;
  double t_sum = 0.0;
  while (!env.done()) {
    const std::size_t a = policy(obs);
    bridge::StepResult r = env.step(a);
    HistoryRow h;
    h.time = env.time();
    h.action = a;
    h.velocity = ec.action_velocity(a);
    h.t_surf = env.surface_temperature();
    h.t_star = h.t_surf / t_d;
    h.reward = r.reward;
    out.history.push_back(h);

    out.summary.total_reward += r.reward;
    in_band += thermal::in_band(h.t_surf, t_d, ec.reward_band) ? 1 : 0;
    t_sum += h.t_surf;
    const auto& values = env.grid().values();
    for (std::size_t i = 0; i < values.size(); ++i) field_sum[i] += values[i];
    obs = std::move(r.obs);
  }

  auto& s = out.summary;
  s.decisions = out.history.size();
  const double n = static_cast<double>(s.decisions);
  s.normalized_reward = s.decisions ? 100.0 * s.total_reward / n : 0.0;
  s.in_band_fraction = s.decisions ? static_cast<double>(in_band) / n : 0.0;
  s.mean_t_surf = s.decisions ? t_sum / n : env.surface_temperature();
  s.final_t_surf = env.surface_temperature();
  s.mean_t_star = s.mean_t_surf / t_d;

  out.mean_field = env.grid();
  if (s.decisions)
    for (std::size_t i = 0; i < field_sum.size(); ++i)
      out.mean_field.values()[i] = field_sum[i] / n;
  return out;
}

}  // namespace

const std::vector<std::string>& metrics_header() {
  static const std::vector<std::string> h = {
      "episode",     "total_reward", "normalized_reward", "mean_t_surf",
      "min_t_surf",  "max_t_surf",   "mean_abs_dv",       "in_band_fraction",
      "epsilon",     "decisions",    "aborted",           "skipped_updates"};
  return h;
}

const std::vector<std::string>& history_header() {
  static const std::vector<std::string> h = {"time", "action", "velocity",
                                             "t_surf", "t_star", "reward"};
  return h;
}

thermal::EnvConfig resolved_env(const RunConfig& cfg) {
  return thermal::with_calibrated_flux(cfg.env);
}

TrainResult train(const RunConfig& cfg, const TrainOptions& opts) {
  cfg.validate();

  std::unique_ptr<thermal::ThermalEnv> local;
  bridge::Environment* env = opts.env;
  if (!env) {
    local = std::make_unique<thermal::ThermalEnv>(resolved_env(cfg));
    env = local.get();
  }
  auto* thermal_env = dynamic_cast<thermal::ThermalEnv*>(env);
  const bridge::EnvSpec spec = env->spec();
  spec.validate();

  rl::AgentConfig agent_cfg = prepared_agent_config(cfg);
  if (agent_cfg.obs_center.size() != spec.obs_dim) {
    // A foreign environment: its observation layout is unknown, feed it raw.
    agent_cfg.obs_center.clear();
    agent_cfg.obs_scale.clear();
  }
  rl::Agent agent(agent_cfg, spec.obs_dim, spec.n_actions, cfg.seed);

  TrainResult result;
  std::unique_ptr<CsvWriter> metrics_out, timing_out;
  if (opts.write_files) {
    result.run_dir = opts.run_dir.empty() ? default_run_dir(cfg) : opts.run_dir;
    ensure_directory(result.run_dir);
    write_text(result.run_dir / "config.ini", to_ini(cfg));
    metrics_out = std::make_unique<CsvWriter>(result.run_dir / "metrics.csv", metrics_header());
    timing_out = std::make_unique<CsvWriter>(result.run_dir / "timing.csv",
                                             std::vector<std::string>{"episode", "wall_clock"});
  }

  const double t_d = cfg.env.props.T_d;
  const double decisions_per_episode = static_cast<double>(spec.max_decisions_per_episode);
  const auto velocity = [&](std::size_t a) {
    return a < cfg.env.n_actions ? cfg.env.action_velocity(a) : static_cast<double>(a);
  };
  std::size_t non_finite_streak = 0;

  for (std::size_t ep = 0; ep < cfg.n_episodes && !result.run_aborted; ++ep) {
    const auto t0 = Clock::now();
    MetricsRow row;
    row.episode = ep;
    const std::uint64_t skipped_before = agent.skipped_updates();
    double t_sum = 0.0;
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    double dv_sum = 0.0;
    std::size_t in_band = 0;

    std::vector<double> obs;
    try {
      obs = env->reset();
    } catch (const Error& e) {
      result.run_aborted = true;
      result.abort_reason = std::string("environment reset failed: ") + e.what();
      row.aborted = true;
    }

    double prev_v = velocity(0);  // reset leaves the jet at the lowest level
    try {
      while (!row.aborted && row.decisions < spec.max_decisions_per_episode) {
        const double eps = agent_cfg.epsilon.value(agent.env_steps());
        const std::size_t a = agent.act(obs, eps);
        bridge::StepResult r = env->step(a);
        agent.remember(obs, a, r.reward, r.obs, false, r.done);
        ++row.decisions;

        if (agent.ready_to_learn()) {
          if (agent.learn()) {
            non_finite_streak = 0;
          } else if (++non_finite_streak > kMaxNonFiniteStreak) {
            result.run_aborted = true;
            result.abort_reason = "more than " + std::to_string(kMaxNonFiniteStreak) +
                                  " consecutive non-finite updates";
            row.aborted = true;
          }
        }

        row.total_reward += r.reward;
        const double v = velocity(a);
        dv_sum += std::abs(v - prev_v);
        prev_v = v;
        if (thermal_env) {
          const double t = thermal_env->surface_temperature();
          t_sum += t;
          t_min = std::min(t_min, t);
          t_max = std::max(t_max, t);
          in_band += thermal::in_band(t, t_d, cfg.env.reward_band) ? 1 : 0;
        } else {
          in_band += r.reward >= 1.0 ? 1 : 0;
        }
        obs = std::move(r.obs);
        if (r.done) break;
      }
    } catch (const StabilityError& e) {
      row.aborted = true;
      std::cerr << "episode " << ep << " aborted: " << e.what() << "\n";
    } catch (const NumericError& e) {
      row.aborted = true;
      std::cerr << "episode " << ep << " aborted: " << e.what() << "\n";
    } catch (const StepError& e) {
      // The next reset decides whether the environment is gone for good.
      row.aborted = true;
      std::cerr << "episode " << ep << " aborted: " << e.what() << "\n";
    }

    const double n = static_cast<double>(row.decisions);
    row.normalized_reward = 100.0 * row.total_reward / decisions_per_episode;
    row.in_band_fraction = row.decisions ? static_cast<double>(in_band) / n : 0.0;
    row.mean_abs_dv = row.decisions ? dv_sum / n : 0.0;
    if (thermal_env && row.decisions) {
      row.mean_t_surf = t_sum / n;
      row.min_t_surf = t_min;
      row.max_t_surf = t_max;
    } else {
      row.mean_t_surf = row.min_t_surf = row.max_t_surf =
          std::numeric_limits<double>::quiet_NaN();
    }
    row.epsilon = agent_cfg.epsilon.value(agent.env_steps());
    row.skipped_updates = agent.skipped_updates() - skipped_before;
    row.wall_clock = seconds_since(t0);

    result.metrics.push_back(row);
    if (metrics_out) {
      metrics_out->write(metrics_csv_row(row));
      metrics_out->flush();
      timing_out->write(CsvRow().add(static_cast<std::uint64_t>(ep)).add(row.wall_clock));
    }
    if (opts.on_episode) opts.on_episode(row);
  }

  result.checkpoint = capture(agent, cfg.seed);
  if (opts.write_files) save_checkpoint(result.checkpoint, result.run_dir / "checkpoint.json");
  return result;
}

RolloutResult evaluate(const Checkpoint& ckpt, const RunConfig& cfg,
                       const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  const thermal::EnvConfig ec = resolved_env(cfg);
  if (ckpt.obs_dim != ec.observation_size() || ckpt.n_actions != ec.n_actions)
    throw ConfigError("checkpoint expects " + std::to_string(ckpt.obs_dim) +
                      " observations and " + std::to_string(ckpt.n_actions) +
                      " actions; the environment has " +
                      std::to_string(ec.observation_size()) + " and " +
                      std::to_string(ec.n_actions));
  const rl::Agent agent = restore(ckpt);
  RolloutResult r =
      rollout(cfg, [&](const std::vector<double>& obs) { return agent.greedy_action(obs); });
  if (out_dir) write_rollout(*out_dir, r);
  return r;
}

RolloutResult run_baseline(std::size_t level, const RunConfig& cfg,
                           const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  if (level >= cfg.env.n_actions)
    throw InputError("velocity level " + std::to_string(level) + " is outside [0, " +
                     std::to_string(cfg.env.n_actions - 1) + "]");
  RolloutResult r = rollout(cfg, [&](const std::vector<double>&) { return level; });
  if (out_dir) write_rollout(*out_dir, r);
  return r;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "layout") return SweepAxis::layout;
  if (name == "episodes") return SweepAxis::episodes;
  if (name == "variant") return SweepAxis::variant;
  throw ConfigError("unknown sweep axis '" + name + "' (expected layout, episodes or variant)");
}

const char* to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::layout: return "layout";
    case SweepAxis::episodes: return "episodes";
    case SweepAxis::variant: return "variant";
  }
  return "unknown";
}

std::vector<std::string> sweep_values(const RunConfig& cfg, SweepAxis axis) {
  std::vector<std::string> out;
  switch (axis) {
    case SweepAxis::layout:
      for (double v : cfg.sweep.layouts) out.push_back(format_double(v));
      break;
    case SweepAxis::episodes:
      for (std::size_t v : cfg.sweep.episodes) out.push_back(std::to_string(v));
      break;
    case SweepAxis::variant:
      out = cfg.sweep.variants;
      break;
  }
  if (out.empty())
    throw ConfigError(std::string("sweep axis '") + to_string(axis) + "' has no values");
  return out;
}

RunConfig sweep_cell_config(const RunConfig& cfg, SweepAxis axis, const std::string& value,
                            std::uint64_t seed) {
  RunConfig c = cfg;
  c.seed = seed;
  switch (axis) {
    case SweepAxis::layout:
      c.env.probes.offset = std::stod(value);
      break;
    case SweepAxis::episodes:
      c.n_episodes = std::stoul(value);
      break;
    case SweepAxis::variant:
      apply_variant_label(c, value);
      break;
  }
  c.validate();
  return c;
}

std::vector<SweepCell> sweep(const RunConfig& cfg, SweepAxis axis, bool write_files,
                             const std::function<void(const SweepCell&)>& on_cell) {
  cfg.validate();
  const std::vector<std::string> values = sweep_values(cfg, axis);
  const std::filesystem::path root =
      output_root(cfg) / cfg.name / (std::string("sweep_") + to_string(axis));

  std::unique_ptr<CsvWriter> long_out, summary_out;
  if (write_files) {
    long_out = std::make_unique<CsvWriter>(
        root / (std::string("sweep_") + to_string(axis) + ".csv"),
        std::vector<std::string>{"axis", "value", "seed", "episode", "normalized_reward",
                                 "total_reward", "in_band_fraction", "mean_t_surf",
                                 "mean_abs_dv", "epsilon", "aborted"});
    summary_out = std::make_unique<CsvWriter>(
        root / (std::string("sweep_") + to_string(axis) + "_summary.csv"),
        std::vector<std::string>{"axis", "value", "seed", "episodes",
                                 "final_normalized_reward", "last10_mean", "last30_std",
                                 "eval_normalized_reward", "eval_in_band_fraction",
                                 "run_aborted"});
  }

  std::vector<SweepCell> cells;
  for (const auto& value : values) {
    for (const std::uint64_t seed : cfg.sweep.seeds) {
      const RunConfig c = sweep_cell_config(cfg, axis, value, seed);
      SweepCell cell;
      cell.axis_value = value;
      cell.seed = seed;
      TrainOptions topts;
      topts.write_files = write_files;
      topts.run_dir = root / (std::string(to_string(axis)) + "_" + value) /
                      ("seed_" + std::to_string(seed));
      cell.train = train(c, topts);
      cell.eval = evaluate(cell.train.checkpoint, c,
                           write_files ? std::optional(topts.run_dir / "eval") : std::nullopt)
                      .summary;

      if (write_files) {
        for (const auto& m : cell.train.metrics)
          long_out->write(CsvRow()
                              .add(to_string(axis))
                              .add(value)
                              .add(seed)
                              .add(static_cast<std::uint64_t>(m.episode))
                              .add(m.normalized_reward)
                              .add(m.total_reward)
                              .add(m.in_band_fraction)
                              .add(m.mean_t_surf)
                              .add(m.mean_abs_dv)
                              .add(m.epsilon)
                              .add(m.aborted));
        const auto& ms = cell.train.metrics;
        auto tail = [&](std::size_t k) {
          const std::size_t n = std::min(k, ms.size());
          std::vector<double> v;
          for (std::size_t i = ms.size() - n; i < ms.size(); ++i)
            v.push_back(ms[i].normalized_reward);
          return v;
        };
        const auto last10 = tail(10);
        const auto last30 = tail(30);
        const double mean10 = last10.empty() ? 0.0
                                             : std::accumulate(last10.begin(), last10.end(), 0.0) /
                                                   static_cast<double>(last10.size());
        double mean30 = 0.0, var30 = 0.0;
        for (double x : last30) mean30 += x;
        if (!last30.empty()) mean30 /= static_cast<double>(last30.size());
        for (double x : last30) var30 += (x - mean30) * (x - mean30);
        if (last30.size() > 1) var30 /= static_cast<double>(last30.size() - 1);
        summary_out->write(CsvRow()
                               .add(to_string(axis))
                               .add(value)
                               .add(seed)
                               .add(static_cast<std::uint64_t>(ms.size()))
                               .add(ms.empty() ? 0.0 : ms.back().normalized_reward)
                               .add(mean10)
                               .add(std::sqrt(var30))
                               .add(cell.eval.normalized_reward)
                               .add(cell.eval.in_band_fraction)
                               .add(cell.train.run_aborted));
        long_out->flush();
        summary_out->flush();
      }
      if (on_cell) on_cell(cell);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace jetrl::harness
