#include "jetrl/thermal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "jetrl/errors.hpp"

namespace jetrl::thermal {

ThermalGrid::ThermalGrid(std::size_t nx, std::size_t ny, double width,
                         double height, double initial_temperature)
    : nx_(nx),
      ny_(ny),
      dx_(width / static_cast<double>(nx)),
      dy_(height / static_cast<double>(ny)),
      T_(nx * ny, initial_temperature) {
  if (nx < 2 || ny < 2) throw ConfigError("grid needs at least 2x2 cells");
  if (!(width > 0.0 && height > 0.0)) throw ConfigError("grid extent must be positive");
}

void ThermalGrid::fill(double value) { std::ranges::fill(T_, value); }

double ThermalGrid::min() const { return *std::ranges::min_element(T_); }
double ThermalGrid::max() const { return *std::ranges::max_element(T_); }

double ThermalGrid::mean() const {
  double sum = 0.0;
  for (double t : T_) sum += t;
  return sum / static_cast<double>(T_.size());
}

bool ThermalGrid::all_finite() const {
  return std::ranges::all_of(T_, [](double t) { return std::isfinite(t); });
}

std::string ThermalGrid::to_csv() const {
  std::string out = "nx,ny,dx,dy\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", nx_, ny_, dx_, dy_);
  out += buf;
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      std::snprintf(buf, sizeof buf, i == 0 ? "%.17g" : ",%.17g", at(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace jetrl::thermal
