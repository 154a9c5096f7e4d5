#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace jetrl::thermal {

/// Cell-centred temperature field on [0, width] x [0, height]. Row j = 0 is
/// the plate-adjacent row; x = 0 is the symmetry axis.
class ThermalGrid {
 public:
  ThermalGrid() = default;
  ThermalGrid(std::size_t nx, std::size_t ny, double width, double height,
              double initial_temperature);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double width() const { return dx_ * static_cast<double>(nx_); }
  double height() const { return dy_ * static_cast<double>(ny_); }

  double x_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx_; }
  double y_center(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dy_; }

  double& at(std::size_t i, std::size_t j) { return T_[j * nx_ + i]; }
  double at(std::size_t i, std::size_t j) const { return T_[j * nx_ + i]; }

  std::vector<double>& values() { return T_; }
  const std::vector<double>& values() const { return T_; }

  void fill(double value);
  double min() const;
  double max() const;
  double mean() const;
  bool all_finite() const;

  /// "nx,ny,dx,dy" header line, the matching values line, then ny rows of
  /// nx temperatures (K), plate row first.
  std::string to_csv() const;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double dx_ = 0.0;
  double dy_ = 0.0;
  std::vector<double> T_;
};

}  // namespace jetrl::thermal
