#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "jetrl/bridge/environment.hpp"
#include "jetrl/thermal/grid.hpp"
#include "jetrl/thermal/jet_flow.hpp"
#include "jetrl/thermal/probes.hpp"
#include "jetrl/thermal/props.hpp"
#include "jetrl/thermal/reward.hpp"
#include "jetrl/thermal/solver.hpp"

namespace jetrl::thermal {

struct EnvConfig {
  FluidPlateProps props;
  JetShape jet_shape;
  ProbeLayout probes;
  double episode_duration = 100.0;    // s
  double dt = 0.01;                   // s per solver step
  std::size_t decision_interval = 10; // solver steps per agent action
  std::size_t n_actions = 10;         // velocities evenly spaced in [0.1, 1] V_inf
  std::size_t nx = 96;
  std::size_t ny = 48;
  double reward_band = kDefaultRewardBand;  // K

  void validate() const;

  std::size_t solver_steps_per_episode() const;
  std::size_t decisions_per_episode() const;
  double decision_period() const { return dt * static_cast<double>(decision_interval); }
  double action_velocity(std::size_t action) const;
  std::size_t observation_size() const;

  bool operator==(const EnvConfig&) const = default;
};

/// Surrogate impinging-jet plate: each step sets the jet to the chosen
/// velocity level and integrates the energy equation for one decision
/// period, sub-stepping each solver step as the stability bound requires.
class ThermalEnv : public bridge::Environment {
 public:
  explicit ThermalEnv(EnvConfig cfg, BoundaryMode mode = BoundaryMode::open);

  bridge::EnvSpec spec() const override;
  std::vector<double> reset() override;
  bridge::StepResult step(std::size_t action) override;

  const EnvConfig& config() const { return cfg_; }
  const ThermalGrid& grid() const { return grid_; }
  ThermalGrid& mutable_grid() { return grid_; }
  const JetFlowModel& jet() const { return jet_; }

  /// Plate-averaged wall temperature. Before any time has been integrated
  /// since reset the wall is still at its initial T_inf; afterwards it is
  /// extrapolated from the plate row through the flux condition.
  double surface_temperature() const;
  double v_jet() const { return jet_.v_jet(); }
  std::size_t decisions_taken() const { return decisions_; }
  std::size_t last_action() const { return last_action_; }
  double time() const;
  bool done() const;
  std::vector<double> observe() const;

  /// Integrates `seconds` of physical time at a fixed action without
  /// touching the decision counter (used for steady-state runs).
  void hold(std::size_t action, double seconds);

 private:
  void set_action(std::size_t action);
  void advance_solver_steps(std::size_t n);

  EnvConfig cfg_;
  ThermalGrid grid_;
  JetFlowModel jet_;
  AdvectionDiffusionSolver solver_;
  std::size_t decisions_ = 0;
  std::size_t last_action_ = 0;
  bool has_reset_ = false;
  bool heated_ = false;
};

/// Runs a constant action from the reset state until the plate temperature
/// changes by less than `tol` K over `window` seconds; returns T_surf.
/// Throws NumericError if this does not happen within `max_time` seconds.
double steady_surface_temperature(const EnvConfig& cfg, std::size_t action,
                                  double tol = 1e-6, double window = 1.0,
                                  double max_time = 3000.0);

}  // namespace jetrl::thermal
