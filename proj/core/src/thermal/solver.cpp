#include "jetrl/thermal/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::thermal {

AdvectionDiffusionSolver::AdvectionDiffusionSolver(const ThermalGrid& grid,
                                                   const JetFlowModel& jet,
                                                   const FluidPlateProps& props,
                                                   BoundaryMode mode)
    : nx_(grid.nx()),
      ny_(grid.ny()),
      stride_(grid.nx() + 2),
      T_inf_(props.T_inf),
      plate_source_(props.q_flux / (props.rho * props.cp * grid.dy())),
      mode_(mode) {
  props.validate();
  const double dx = grid.dx();
  const double dy = grid.dy();
  dif_x_ = props.alpha() / (dx * dx);
  dif_y_ = props.alpha() / (dy * dy);

  // Unit-velocity stream function at cell corners.
  const auto psi = [&](std::size_t i, std::size_t j) {
    const double x = std::min(static_cast<double>(i) * dx, jet.width());
    const double y = std::min(static_cast<double>(j) * dy, jet.height());
    return jet.profile_x(x) * jet.profile_y(y);
  };

  const std::size_t n = nx_ * ny_;
  a_w_.assign(n, 0.0);
  a_e_.assign(n, 0.0);
  a_s_.assign(n, 0.0);
  a_n_.assign(n, 0.0);
  for (std::size_t j = 0; j < ny_; ++j)
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t c = j * nx_ + i;
      const double u_w = (psi(i, j + 1) - psi(i, j)) / dy;
      const double u_e = (psi(i + 1, j + 1) - psi(i + 1, j)) / dy;
      const double v_s = -(psi(i + 1, j) - psi(i, j)) / dx;
      const double v_n = -(psi(i + 1, j + 1) - psi(i, j + 1)) / dx;
      a_w_[c] = i == 0 ? 0.0 : u_w / dx;  // symmetry axis: psi = 0 there anyway
      a_s_[c] = j == 0 ? 0.0 : v_s / dy;  // plate: no penetration
      const bool closed = mode_ == BoundaryMode::closed;
      a_e_[c] = (i + 1 == nx_ && closed) ? 0.0 : -u_e / dx;
      a_n_[c] = (j + 1 == ny_ && closed) ? 0.0 : -v_n / dy;
    }

  cP_.assign(n, 0.0);
  cW_.assign(n, 0.0);
  cE_.assign(n, 0.0);
  cS_.assign(n, 0.0);
  cN_.assign(n, 0.0);
  src_.assign(n, 0.0);
  cur_.assign(stride_ * (ny_ + 2), T_inf_);
  next_ = cur_;
}

void AdvectionDiffusionSolver::prepare(double v_jet) {
  if (v_jet == prepared_v_) return;
  if (!(v_jet >= 0.0) || !std::isfinite(v_jet))
    throw InputError("jet velocity must be finite and non-negative");
  double worst = 0.0;
  for (std::size_t j = 0; j < ny_; ++j)
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t c = j * nx_ + i;
      const double dw = i > 0 ? dif_x_ : 0.0;
      const double de = i + 1 < nx_ ? dif_x_ : 0.0;
      const double ds = j > 0 ? dif_y_ : 0.0;
      const double dn = j + 1 < ny_ ? dif_y_ : 0.0;
      const double aw = v_jet * a_w_[c];
      const double ae = v_jet * a_e_[c];
      const double as = v_jet * a_s_[c];
      const double an = v_jet * a_n_[c];
      cW_[c] = std::max(aw, 0.0) + dw;
      cE_[c] = std::max(ae, 0.0) + de;
      cS_[c] = std::max(as, 0.0) + ds;
      cN_[c] = std::max(an, 0.0) + dn;
      cP_[c] = std::min(aw, 0.0) + std::min(ae, 0.0) + std::min(as, 0.0) +
               std::min(an, 0.0) - (dw + de + ds + dn);
      src_[c] = j == 0 ? plate_source_ : 0.0;
      worst = std::max(worst, -cP_[c]);
    }
  limit_ = worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
  prepared_v_ = v_jet;
}

double AdvectionDiffusionSolver::stability_limit(double v_jet) {
  prepare(v_jet);
  return limit_;
}

std::size_t AdvectionDiffusionSolver::substeps_for(double v_jet, double dt,
                                                   double safety) {
  const double limit = stability_limit(v_jet);
  if (!std::isfinite(limit)) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / (safety * limit))));
}

void AdvectionDiffusionSolver::check_grid(const ThermalGrid& grid) const {
  if (grid.nx() != nx_ || grid.ny() != ny_)
    throw InputError("grid does not match the solver discretization");
}

void AdvectionDiffusionSolver::step(ThermalGrid& grid, double v_jet, double dt) {
  advance(grid, v_jet, dt, 1);
}

void AdvectionDiffusionSolver::advance(ThermalGrid& grid, double v_jet,
                                       double dt, std::size_t n_sub) {
  check_grid(grid);
  if (n_sub == 0) throw InputError("advance: need at least one sub-step");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
  prepare(v_jet);
  const double h = dt / static_cast<double>(n_sub);
  if (h > limit_)
    throw StabilityError("time step " + std::to_string(h) +
                         " s exceeds the stability limit " +
                         std::to_string(limit_) + " s");

  const auto& T = grid.values();
  for (std::size_t j = 0; j < ny_; ++j)
    std::copy_n(T.data() + j * nx_, nx_, cur_.data() + (j + 1) * stride_ + 1);

  const std::size_t s = stride_;
  for (std::size_t k = 0; k < n_sub; ++k) {
    for (std::size_t j = 0; j < ny_; ++j) {
      const double* tp = cur_.data() + (j + 1) * s + 1;
      double* out = next_.data() + (j + 1) * s + 1;
      const std::size_t row = j * nx_;
      const double* cp = cP_.data() + row;
      const double* cw = cW_.data() + row;
      const double* ce = cE_.data() + row;
      const double* cs = cS_.data() + row;
      const double* cn = cN_.data() + row;
      const double* src = src_.data() + row;
      for (std::size_t i = 0; i < nx_; ++i) {
        const double rhs = cp[i] * tp[i] + cw[i] * tp[i - 1] + ce[i] * tp[i + 1] +
                           cs[i] * tp[i - s] + cn[i] * tp[i + s] + src[i];
        out[i] = tp[i] + h * rhs;
      }
    }
    cur_.swap(next_);
  }

  auto& Tout = grid.values();
  for (std::size_t j = 0; j < ny_; ++j)
    std::copy_n(cur_.data() + (j + 1) * stride_ + 1, nx_, Tout.data() + j * nx_);
}

void advect_diffuse_step(ThermalGrid& grid, const JetFlowModel& jet,
                         const FluidPlateProps& props, double dt,
                         BoundaryMode mode) {
  AdvectionDiffusionSolver solver(grid, jet, props, mode);
  solver.step(grid, jet.v_jet(), dt);
}

}  // namespace jetrl::thermal
