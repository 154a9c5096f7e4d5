#include "jetrl/thermal/reward.hpp"

#include <cmath>

#include "jetrl/errors.hpp"

namespace jetrl::thermal {

double reward_fn(double t_surf, double t_d, double band) {
  if (!(t_surf > 0.0 && t_d > 0.0)) throw InputError("temperatures must be positive");
  if (in_band(t_surf, t_d, band)) return 1.0;
  return 0.1 - std::abs(t_surf / t_d - 1.0) * 0.1;
}

}  // namespace jetrl::thermal
