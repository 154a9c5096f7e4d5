#pragma once

#include <cstdint>
#include <span>

#include "jetrl/random.hpp"

namespace jetrl::rl {

/// Linear decay from eps_start to eps_end over decay_steps, constant after.
struct EpsilonSchedule {
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::uint64_t decay_steps = 1;

  void validate() const;
  double value(std::uint64_t step) const;
  bool operator==(const EpsilonSchedule&) const = default;
};

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> q);

/// Epsilon-greedy choice. Consumes one uniform draw to decide between
/// exploring and exploiting and, when exploring, one more for the action.
std::size_t select_action(std::span<const double> q, double eps, Rng& rng);

}  // namespace jetrl::rl
