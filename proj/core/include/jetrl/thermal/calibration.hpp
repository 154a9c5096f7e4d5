#pragma once

#include <cstddef>

#include "jetrl/thermal/thermal_env.hpp"

namespace jetrl::thermal {

struct CalibrationOptions {
  double tolerance = 0.1;  // K, |steady T_surf - T_d| at the reference action
  std::size_t max_iterations = 60;
  double initial_upper = 100.0;  // W/m^2, doubled until it brackets T_d
};

struct CalibrationResult {
  double q_flux = 0.0;
  double steady_t_surf = 0.0;
  std::size_t reference_action = 0;
  std::size_t iterations = 0;
};

/// Middle velocity level, (n_actions - 1) / 2.
std::size_t reference_action(const EnvConfig& cfg);

/// Finds the plate heat flux for which the steady plate temperature at the
/// reference action equals T_d within the tolerance. The root is bracketed
/// (q = 0 gives T_inf < T_d; the upper end is doubled until T_surf > T_d)
/// and then narrowed by regula falsi with the Illinois modification. Every
/// evaluation is a full steady-state simulation.
CalibrationResult calibrate_heat_flux(const EnvConfig& cfg,
                                      CalibrationOptions opts = {});

/// cfg with props.q_flux filled in by calibrate_heat_flux when it is zero.
/// Results are memoized per configuration within the process.
EnvConfig with_calibrated_flux(const EnvConfig& cfg);

}  // namespace jetrl::thermal
