#pragma once

#include <vector>

#include "jetrl/thermal/grid.hpp"
#include "jetrl/thermal/jet_flow.hpp"
#include "jetrl/thermal/props.hpp"

namespace jetrl::thermal {

enum class BoundaryMode {
  /// Jet inflow at T_inf through the top, zero-gradient outflow at the top
  /// and far side, symmetry at x = 0, heat flux through the plate.
  open,
  /// Every boundary except the plate is adiabatic and impermeable; used to
  /// check the discrete energy budget. The jet field crosses those
  /// boundaries, so with v_jet > 0 this mode conserves energy but is not
  /// bounded; it is an accounting device, not a physical configuration.
  closed,
};

/// Explicit finite-volume update of dT/dt + u . grad T = alpha lap T.
///
/// Advection is first-order upwind on face fluxes built from stream-function
/// differences, so each cell is exactly divergence-free. Diffusion is the
/// standard five-point stencil. The plate (y = 0) carries -k dT/dy = q''.
///
/// A step of length dt is accepted when, in every cell,
///   dt * (outflow rate + diffusive exchange rate) <= 1,
/// which keeps the update a convex combination (discrete maximum principle)
/// and implies dt <= dx/|u|max, dy/|v|max and dx^2 dy^2 / (2 alpha (dx^2 + dy^2)).
class AdvectionDiffusionSolver {
 public:
  AdvectionDiffusionSolver(const ThermalGrid& grid, const JetFlowModel& jet_shape,
                           const FluidPlateProps& props,
                           BoundaryMode mode = BoundaryMode::open);

  /// Largest admissible dt at jet velocity v_jet.
  double stability_limit(double v_jet);

  /// Advances `grid` by one step of length dt. Throws StabilityError (and
  /// leaves the grid untouched) when dt exceeds stability_limit(v_jet).
  void step(ThermalGrid& grid, double v_jet, double dt);

  /// Advances by n_sub equal sub-steps of dt / n_sub.
  void advance(ThermalGrid& grid, double v_jet, double dt, std::size_t n_sub);

  /// Number of equal sub-steps needed for a step of dt at v_jet.
  std::size_t substeps_for(double v_jet, double dt, double safety = 0.9);

  BoundaryMode mode() const { return mode_; }

 private:
  void prepare(double v_jet);
  void check_grid(const ThermalGrid& grid) const;

  std::size_t nx_;
  std::size_t ny_;
  std::size_t stride_;  // padded row length nx + 2
  double T_inf_;
  double plate_source_;  // plate-row heating rate, K/s
  BoundaryMode mode_;

  // Signed unit-velocity exchange rates (1/s per m/s of jet velocity) per
  // cell; positive means flow from that neighbour into the cell.
  std::vector<double> a_w_, a_e_, a_s_, a_n_;
  double dif_x_;  // alpha / dx^2
  double dif_y_;  // alpha / dy^2

  // T_new = T + dt (cP T + cW T_W + cE T_E + cS T_S + cN T_N + src)
  double prepared_v_ = -1.0;
  std::vector<double> cP_, cW_, cE_, cS_, cN_, src_;
  double limit_ = 0.0;

  // Padded copies of the field; ghost cells on the open sides hold T_inf.
  std::vector<double> cur_, next_;
};

/// One explicit step with a solver built for this call (convenience form;
/// the environment keeps a solver alive across steps).
void advect_diffuse_step(ThermalGrid& grid, const JetFlowModel& jet,
                         const FluidPlateProps& props, double dt,
                         BoundaryMode mode = BoundaryMode::open);

}  // namespace jetrl::thermal
