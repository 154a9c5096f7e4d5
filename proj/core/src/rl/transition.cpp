#include "jetrl/rl/transition.hpp"

#include <cmath>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::rl {

void validate(const Transition& t, std::size_t n_actions) {
  if (t.a >= n_actions)
    throw InputError("transition action " + std::to_string(t.a) +
                     " outside [0, " + std::to_string(n_actions) + ")");
  if (!(t.gamma_next >= 0.0 && t.gamma_next <= 1.0))
    throw InputError("transition gamma_next outside [0, 1]");
  if (t.done != (t.gamma_next == 0.0))
    throw InputError(t.done ? "terminal transition with non-zero gamma_next"
                            : "non-terminal transition with gamma_next == 0");
  if (!std::isfinite(t.r)) throw InputError("transition reward is not finite");
  for (double v : t.s)
    if (!std::isfinite(v)) throw InputError("transition state is not finite");
  for (double v : t.s_next)
    if (!std::isfinite(v))
      throw InputError("transition next state is not finite");
}

}  // namespace jetrl::rl
