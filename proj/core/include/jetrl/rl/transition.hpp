#pragma once

#include <cstddef>
#include <vector>

namespace jetrl::rl {

/// (S_t, A_t, R_{t+1}, gamma_{t+1}, S_{t+1}) plus an explicit terminal flag.
/// A terminal transition carries gamma_next == 0 and vice versa.
struct Transition {
  std::vector<double> s;
  std::size_t a = 0;
  double r = 0.0;
  double gamma_next = 0.0;
  std::vector<double> s_next;
  bool done = false;

  bool operator==(const Transition&) const = default;
};

/// Throws InputError when the invariants are broken: done <=> gamma_next == 0,
/// gamma_next in [0, 1], a < n_actions, finite reward and observations.
void validate(const Transition& t, std::size_t n_actions);

}  // namespace jetrl::rl
