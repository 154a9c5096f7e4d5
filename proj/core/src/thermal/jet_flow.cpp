#include "jetrl/thermal/jet_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::thermal {

JetFlowModel::JetFlowModel(const FluidPlateProps& props, JetShape shape)
    : shape_(shape),
      width_(props.half_width()),
      height_(props.H()),
      w_(shape.core_half_width * props.d),
      xp_(shape.wall_jet_peak * props.d),
      boost_(shape.wall_jet_boost),
      delta_(shape.layer_thickness * props.d) {
  if (!(w_ > 0.0 && xp_ > 0.0 && delta_ > 0.0 && boost_ >= 0.0))
    throw ConfigError("jet shape parameters must be positive");
}

void JetFlowModel::set_velocity(double v_jet) {
  if (!(v_jet >= 0.0) || !std::isfinite(v_jet))
    throw InputError("jet velocity must be finite and non-negative");
  v_jet_ = v_jet;
}

double JetFlowModel::profile_x(double x) const {
  const double r = x / xp_;
  return w_ * std::tanh(x / w_) + boost_ * w_ * r * r * std::exp(1.0 - r * r);
}

double JetFlowModel::profile_x_deriv(double x) const {
  const double r = x / xp_;
  const double sech = 1.0 / std::cosh(x / w_);
  return sech * sech +
         boost_ * w_ * (2.0 * x / (xp_ * xp_)) * (1.0 - r * r) * std::exp(1.0 - r * r);
}

double JetFlowModel::profile_y(double y) const {
  const double s = y / delta_;
  return 1.0 - (1.0 + s) * std::exp(-s);
}

double JetFlowModel::profile_y_deriv(double y) const {
  const double s = y / delta_;
  return s / delta_ * std::exp(-s);
}

double JetFlowModel::stream_function(double x, double y) const {
  return v_jet_ * profile_x(x) * profile_y(y);
}

void JetFlowModel::check_point(double x, double y) const {
  if (!(x >= 0.0 && x <= width_ && y >= 0.0 && y <= height_))
    throw InputError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                     ") lies outside the flow domain");
}

Velocity JetFlowModel::velocity(double x, double y) const {
  check_point(x, y);
  return {v_jet_ * profile_x(x) * profile_y_deriv(y),
          -v_jet_ * profile_x_deriv(x) * profile_y(y)};
}

double max_discrete_divergence(const JetFlowModel& jet, std::size_t nx,
                               std::size_t ny) {
  if (nx == 0 || ny == 0) throw InputError("divergence stencil must be non-empty");
  const double dx = jet.width() / static_cast<double>(nx);
  const double dy = jet.height() / static_cast<double>(ny);
  const auto psi = [&](std::size_t i, std::size_t j) {
    return jet.stream_function(std::min(i * dx, jet.width()),
                               std::min(j * dy, jet.height()));
  };
  double worst = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double u_w = (psi(i, j + 1) - psi(i, j)) / dy;
      const double u_e = (psi(i + 1, j + 1) - psi(i + 1, j)) / dy;
      const double v_s = -(psi(i + 1, j) - psi(i, j)) / dx;
      const double v_n = -(psi(i + 1, j + 1) - psi(i, j + 1)) / dx;
      worst = std::max(worst, std::abs((u_e - u_w) / dx + (v_n - v_s) / dy));
    }
  return worst;
}

}  // namespace jetrl::thermal
