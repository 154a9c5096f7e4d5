#pragma once

namespace jetrl::thermal {

inline constexpr double kDefaultRewardBand = 2.0;  // K

/// +1 while |T_surf - T_d| < band, otherwise 0.1 - 0.1 |T_surf / T_d - 1|.
double reward_fn(double t_surf, double t_d, double band = kDefaultRewardBand);

inline bool in_band(double t_surf, double t_d, double band = kDefaultRewardBand) {
  const double dev = t_surf - t_d;
  return (dev < 0.0 ? -dev : dev) < band;
}

}  // namespace jetrl::thermal
