#include "jetrl/thermal/thermal_env.hpp"

#include <cmath>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::thermal {

void EnvConfig::validate() const {
  props.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(episode_duration > 0.0)) throw ConfigError("episode_duration must be positive");
  const double steps = episode_duration / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
    throw ConfigError("episode_duration must be an integer multiple of dt");
  if (decision_interval < 1) throw ConfigError("decision_interval must be at least 1");
  if (solver_steps_per_episode() % decision_interval != 0)
    throw ConfigError("solver steps per episode must be a multiple of decision_interval");
  if (n_actions < 2) throw ConfigError("need at least two velocity levels");
  if (nx < 2 || ny < 2) throw ConfigError("grid needs at least 2x2 cells");
  if (!(reward_band > 0.0)) throw ConfigError("reward band must be positive");
  probes.validate(props.half_width(), props.H());
}

std::size_t EnvConfig::solver_steps_per_episode() const {
  return static_cast<std::size_t>(std::llround(episode_duration / dt));
}

std::size_t EnvConfig::decisions_per_episode() const {
  return solver_steps_per_episode() / decision_interval;
}

double EnvConfig::action_velocity(std::size_t action) const {
  if (action >= n_actions)
    throw InputError("action " + std::to_string(action) + " outside [0, " +
                     std::to_string(n_actions) + ")");
  const double lo = 0.1 * props.V_inf;
  const double hi = props.V_inf;
  return lo + (hi - lo) * static_cast<double>(action) /
                  static_cast<double>(n_actions - 1);
}

std::size_t EnvConfig::observation_size() const {
  const std::size_t n = probes.x_positions.empty() ? probes.n_probes
                                                   : probes.x_positions.size();
  return 2 * n + 1;
}

namespace {

EnvConfig validated(EnvConfig cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

ThermalEnv::ThermalEnv(EnvConfig cfg, BoundaryMode mode)
    : cfg_(validated(std::move(cfg))),
      grid_(cfg_.nx, cfg_.ny, cfg_.props.half_width(), cfg_.props.H(),
            cfg_.props.T_inf),
      jet_(cfg_.props, cfg_.jet_shape),
      solver_(grid_, jet_, cfg_.props, mode) {
  set_action(0);
}

bridge::EnvSpec ThermalEnv::spec() const {
  return {cfg_.observation_size(), cfg_.n_actions, cfg_.decisions_per_episode(),
          bridge::kProtocolVersion};
}

std::vector<double> ThermalEnv::reset() {
  grid_.fill(cfg_.props.T_inf);
  set_action(0);
  decisions_ = 0;
  has_reset_ = true;
  heated_ = false;
  return observe();
}

bridge::StepResult ThermalEnv::step(std::size_t action) {
  if (action >= cfg_.n_actions)
    throw InputError("action " + std::to_string(action) + " outside [0, " +
                     std::to_string(cfg_.n_actions) + ")");
  if (!has_reset_) throw StateError("step() before reset()");
  if (done()) throw StateError("step() after the episode finished");
  set_action(action);
  advance_solver_steps(cfg_.decision_interval);
  ++decisions_;
  if (!grid_.all_finite()) throw NumericError("temperature field became non-finite");
  const double t_surf = surface_temperature();
  return {observe(), reward_fn(t_surf, cfg_.props.T_d, cfg_.reward_band), done()};
}

double ThermalEnv::surface_temperature() const {
  if (!heated_) return cfg_.props.T_inf;
  return surface_avg_temperature(grid_, cfg_.props);
}

double ThermalEnv::time() const {
  return cfg_.decision_period() * static_cast<double>(decisions_);
}

bool ThermalEnv::done() const { return decisions_ >= cfg_.decisions_per_episode(); }

std::vector<double> ThermalEnv::observe() const {
  return probe_read(grid_, jet_, cfg_.probes, cfg_.props, last_action_);
}

void ThermalEnv::hold(std::size_t action, double seconds) {
  set_action(action);
  const auto n = static_cast<std::size_t>(std::llround(seconds / cfg_.dt));
  advance_solver_steps(n);
}

void ThermalEnv::set_action(std::size_t action) {
  jet_.set_velocity(cfg_.action_velocity(action));
  last_action_ = action;
}

void ThermalEnv::advance_solver_steps(std::size_t n) {
  if (n == 0) return;
  const std::size_t sub = solver_.substeps_for(jet_.v_jet(), cfg_.dt);
  solver_.advance(grid_, jet_.v_jet(), cfg_.dt * static_cast<double>(n), sub * n);
  heated_ = true;
}

double steady_surface_temperature(const EnvConfig& cfg, std::size_t action,
                                  double tol, double window, double max_time) {
  ThermalEnv env(cfg);
  env.reset();
  double prev = env.surface_temperature();
  for (double t = 0.0; t < max_time; t += window) {
    env.hold(action, window);
    const double now = env.surface_temperature();
    if (std::abs(now - prev) < tol) return now;
    prev = now;
  }
  throw NumericError("plate temperature did not settle within " +
                     std::to_string(max_time) + " s at action " + std::to_string(action));
}

}  // namespace jetrl::thermal
