#include "jetrl/thermal/probes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::thermal {

std::vector<ProbePoint> ProbeLayout::points(double plate_extent) const {
  std::vector<ProbePoint> out;
  if (!x_positions.empty()) {
    for (double x : x_positions) out.push_back({x, offset});
    return out;
  }
  const double seg = plate_extent / static_cast<double>(n_probes);
  for (std::size_t i = 0; i < n_probes; ++i)
    out.push_back({(static_cast<double>(i) + 0.5) * seg, offset});
  return out;
}

void ProbeLayout::validate(double width, double height) const {
  if (x_positions.empty() && n_probes == 0)
    throw ConfigError("probe layout needs at least one probe");
  if (!(offset > 0.0)) throw ConfigError("probe offset L must be positive");
  for (const auto& p : points(width))
    if (!(p.x >= 0.0 && p.x <= width && p.y > 0.0 && p.y <= height))
      throw ConfigError("probe at (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ") lies outside the domain");
}

namespace {

// Index of the lower bracketing cell centre and the weight of the upper one.
std::pair<std::size_t, double> bracket(double pos, double h, std::size_t n) {
  const double s = pos / h - 0.5;  // continuous cell-centre coordinate
  if (s <= 0.0) return {0, 0.0};
  if (s >= static_cast<double>(n - 1)) return {n - 2, 1.0};
  const auto lo = static_cast<std::size_t>(std::floor(s));
  return {lo, s - static_cast<double>(lo)};
}

}  // namespace

double bilinear_sample(const ThermalGrid& grid, std::span<const double> field,
                       double x, double y) {
  if (field.size() != grid.nx() * grid.ny())
    throw InputError("field size does not match grid");
  if (!(x >= 0.0 && x <= grid.width() && y >= 0.0 && y <= grid.height()))
    throw ConfigError("sample point (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") lies outside the grid");
  const auto [i, fx] = bracket(x, grid.dx(), grid.nx());
  const auto [j, fy] = bracket(y, grid.dy(), grid.ny());
  const std::size_t nx = grid.nx();
  const double f00 = field[j * nx + i];
  const double f10 = field[j * nx + i + 1];
  const double f01 = field[(j + 1) * nx + i];
  const double f11 = field[(j + 1) * nx + i + 1];
  return (1.0 - fy) * ((1.0 - fx) * f00 + fx * f10) +
         fy * ((1.0 - fx) * f01 + fx * f11);
}

namespace {

double speed_sample(const ThermalGrid& grid, const JetFlowModel& jet, double x,
                    double y) {
  const auto [i, fx] = bracket(x, grid.dx(), grid.nx());
  const auto [j, fy] = bracket(y, grid.dy(), grid.ny());
  const auto speed = [&](std::size_t ci, std::size_t cj) {
    const Velocity v = jet.velocity(grid.x_center(ci), grid.y_center(cj));
    return std::hypot(v.u, v.v);
  };
  return (1.0 - fy) * ((1.0 - fx) * speed(i, j) + fx * speed(i + 1, j)) +
         fy * ((1.0 - fx) * speed(i, j + 1) + fx * speed(i + 1, j + 1));
}

}  // namespace

std::vector<double> probe_read(const ThermalGrid& grid, const JetFlowModel& jet,
                               const ProbeLayout& layout,
                               const FluidPlateProps& props,
                               std::size_t previous_action) {
  layout.validate(grid.width(), grid.height());
  const auto pts = layout.points(grid.width());
  std::vector<double> obs;
  obs.reserve(2 * pts.size() + 1);
  for (const auto& p : pts)
    obs.push_back(bilinear_sample(grid, grid.values(), p.x, p.y) / props.T_d);
  for (const auto& p : pts) obs.push_back(speed_sample(grid, jet, p.x, p.y) / props.V_inf);
  obs.push_back(static_cast<double>(previous_action));
  return obs;
}

double surface_avg_temperature(const ThermalGrid& grid, const FluidPlateProps& props) {
  const double lift = props.q_flux * 0.5 * grid.dy() / props.k;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.nx(); ++i) sum += grid.at(i, 0) + lift;
  return sum / static_cast<double>(grid.nx());
}

}  // namespace jetrl::thermal
