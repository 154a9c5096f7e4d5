#pragma once

#include <cstddef>

#include "jetrl/thermal/props.hpp"

namespace jetrl::thermal {

/// Shape of the prescribed impinging-jet flow, in jet diameters.
struct JetShape {
  double core_half_width = 0.5;  // jet core half-width w
  double wall_jet_peak = 1.5;    // x of the wall-jet velocity maximum
  double wall_jet_boost = 0.5;   // relative overshoot of the wall jet
  double layer_thickness = 0.25;  // turning-layer thickness delta above the plate

  bool operator==(const JetShape&) const = default;
};

struct Velocity {
  double u = 0.0;  // along the plate
  double v = 0.0;  // normal to the plate, positive away from it
};

/// Planar stagnation / wall-jet flow from the stream function
///
///   psi(x, y) = v_jet * X(x) * Y(y)
///   X(x) = w tanh(x / w) + b w (x / xp)^2 exp(1 - (x / xp)^2)
///   Y(y) = 1 - (1 + y / delta) exp(-y / delta)
///
/// with u = dpsi/dy and v = -dpsi/dx, so the field is divergence-free and
/// scales linearly with v_jet. X(0) = 0 puts the symmetry axis at x = 0;
/// Y(0) = Y'(0) = 0 gives no penetration and no slip at the plate. Far from
/// the plate the jet descends at -v_jet on the axis; near the plate the
/// horizontal velocity rises with x, peaks near xp and relaxes to a plateau.
class JetFlowModel {
 public:
  explicit JetFlowModel(const FluidPlateProps& props, JetShape shape = {});

  void set_velocity(double v_jet);
  double v_jet() const { return v_jet_; }
  const JetShape& shape() const { return shape_; }

  double width() const { return width_; }    // domain extent along the plate
  double height() const { return height_; }  // nozzle-to-plate distance

  /// Unit-velocity profiles and their derivatives.
  double profile_x(double x) const;
  double profile_x_deriv(double x) const;
  double profile_y(double y) const;
  double profile_y_deriv(double y) const;

  /// psi at the current v_jet; defined on the closed domain.
  double stream_function(double x, double y) const;

  /// Analytic velocity. Throws InputError outside [0, width] x [0, height].
  Velocity velocity(double x, double y) const;

 private:
  void check_point(double x, double y) const;

  JetShape shape_;
  double width_;
  double height_;
  double w_;
  double xp_;
  double boost_;
  double delta_;
  double v_jet_ = 0.0;
};

/// Largest |du/dx + dv/dy| over an nx x ny cell stencil covering the
/// domain, with face-normal velocities taken from stream-function
/// differences across each face (the same fluxes the solver uses).
double max_discrete_divergence(const JetFlowModel& jet, std::size_t nx,
                               std::size_t ny);

}  // namespace jetrl::thermal
