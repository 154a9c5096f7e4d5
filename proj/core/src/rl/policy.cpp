#include "jetrl/rl/policy.hpp"

#include <algorithm>
#include <cmath>

#include "jetrl/errors.hpp"

namespace jetrl::rl {

void EpsilonSchedule::validate() const {
  if (!(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0))
    throw ConfigError("epsilon endpoints must lie in [0, 1]");
  if (decay_steps == 0) throw ConfigError("epsilon decay_steps must be positive");
}

double EpsilonSchedule::value(std::uint64_t step) const {
  const double frac = std::min(
      static_cast<double>(step) / static_cast<double>(decay_steps), 1.0);
  return eps_start + (eps_end - eps_start) * frac;
}

std::size_t argmax(std::span<const double> q) {
  if (q.empty()) throw InputError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

std::size_t select_action(std::span<const double> q, double eps, Rng& rng) {
  if (q.empty()) throw InputError("select_action: empty Q vector");
  if (!(eps >= 0.0 && eps <= 1.0))
    throw InputError("select_action: epsilon outside [0, 1]");
  for (double v : q)
    if (!std::isfinite(v)) throw InputError("select_action: non-finite Q value");
  if (uniform01(rng) < eps) return uniform_index(rng, q.size());
  return argmax(q);
}

}  // namespace jetrl::rl
