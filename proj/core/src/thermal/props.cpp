#include "jetrl/thermal/props.hpp"

#include <cmath>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::thermal {

void FluidPlateProps::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(name) + " must be positive");
  };
  positive(rho, "rho");
  positive(mu, "mu");
  positive(k, "k");
  positive(cp, "cp");
  positive(d, "d");
  positive(H_over_d, "H_over_d");
  positive(plate_len_over_d, "plate_len_over_d");
  positive(V_inf, "V_inf");
  positive(T_inf, "T_inf");
  positive(T_d, "T_d");
  if (!(q_flux >= 0.0) || !std::isfinite(q_flux))
    throw ConfigError("q_flux must be non-negative");
}

double reynolds(const FluidPlateProps& props, double velocity) {
  if (!(velocity >= 0.0)) throw InputError("reynolds: velocity must be non-negative");
  return props.rho * velocity * props.d / props.mu;
}

}  // namespace jetrl::thermal
