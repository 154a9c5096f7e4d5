#pragma once

namespace jetrl::thermal {

/// Fluid, plate and jet parameters. Defaults: air at the conditions of the
/// reference impinging-jet case (d = 25 mm, H/d = 4, 8d square plate).
/// Diffusivities are derived, never stored.
struct FluidPlateProps {
  double rho = 1.225;        // kg/m^3
  double mu = 1.789e-5;      // Pa s
  double k = 0.024;          // W/(m K)
  double cp = 1006.0;        // J/(kg K)
  double q_flux = 0.0;       // W/m^2 plate heat flux; 0 until calibrated
  double d = 0.025;          // m, jet diameter
  double H_over_d = 4.0;     // nozzle-to-plate distance in diameters
  double plate_len_over_d = 8.0;
  double V_inf = 1.0;        // m/s
  double T_inf = 288.0;      // K
  double T_d = 303.0;        // K, setpoint

  double alpha() const { return k / (rho * cp); }
  double nu() const { return mu / rho; }
  double H() const { return H_over_d * d; }
  double plate_len() const { return plate_len_over_d * d; }
  /// Extent of the simulated half domain along the plate (symmetry at x=0).
  double half_width() const { return 0.5 * plate_len(); }

  /// Throws ConfigError unless all properties are positive (q_flux >= 0).
  void validate() const;
  bool operator==(const FluidPlateProps&) const = default;
};

/// rho * V * d / mu.
double reynolds(const FluidPlateProps& props, double velocity);

}  // namespace jetrl::thermal
