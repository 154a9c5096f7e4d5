#pragma once

#include <span>
#include <vector>

#include "jetrl/thermal/grid.hpp"
#include "jetrl/thermal/jet_flow.hpp"
#include "jetrl/thermal/props.hpp"

namespace jetrl::thermal {

struct ProbePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Sensors at height `offset` above the plate. With `x_positions` empty the
/// probes sit at the centres of n_probes equal segments of the plate.
struct ProbeLayout {
  std::size_t n_probes = 5;
  double offset = 0.001;  // m
  std::vector<double> x_positions;

  std::vector<ProbePoint> points(double plate_extent) const;
  /// Throws ConfigError for probes outside [0, width] x (0, height].
  void validate(double width, double height) const;

  bool operator==(const ProbeLayout&) const = default;
};

/// Bilinear interpolation of a cell-centred grid field. Points within half a
/// cell of the boundary take the value of the nearest cell centre along that
/// axis. Throws ConfigError for points outside the grid.
double bilinear_sample(const ThermalGrid& grid, std::span<const double> field,
                       double x, double y);

/// Observation vector: probe temperatures / T_d, then probe speeds / V_inf
/// (bilinear in the cell-centre |u|), then the previous action index.
std::vector<double> probe_read(const ThermalGrid& grid, const JetFlowModel& jet,
                               const ProbeLayout& layout,
                               const FluidPlateProps& props,
                               std::size_t previous_action);

/// Plate-averaged wall temperature: each plate-row cell is extrapolated to
/// the wall through the flux condition, T_wall = T_cell + q'' (dy / 2) / k.
double surface_avg_temperature(const ThermalGrid& grid, const FluidPlateProps& props);

}  // namespace jetrl::thermal
