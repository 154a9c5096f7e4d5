#pragma once

#include <cstddef>
#include <mutex>
#include <vector>

#include "jetrl/random.hpp"
#include "jetrl/rl/transition.hpp"

namespace jetrl::rl {

/// Fixed-capacity FIFO store of transitions with uniform sampling.
///
/// push() and sample() lock an internal mutex so one environment thread and
/// one learner thread may share a buffer.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  ReplayBuffer(const ReplayBuffer& other);
  ReplayBuffer& operator=(const ReplayBuffer& other);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  void push(Transition t);

  /// n draws uniformly with replacement. Throws StateError when empty.
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;

  /// Current contents, oldest first.
  std::vector<Transition> contents() const;

  void clear();

 private:
  std::size_t capacity_;
  std::vector<Transition> slots_;
  std::size_t cursor_ = 0;  // next slot to write once full
  mutable std::mutex mutex_;
};

}  // namespace jetrl::rl
