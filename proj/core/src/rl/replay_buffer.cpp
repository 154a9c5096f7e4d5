#include "jetrl/rl/replay_buffer.hpp"

#include <algorithm>

#include "jetrl/errors.hpp"

namespace jetrl::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
  slots_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

ReplayBuffer::ReplayBuffer(const ReplayBuffer& other) {
  std::lock_guard lock(other.mutex_);
  capacity_ = other.capacity_;
  slots_ = other.slots_;
  cursor_ = other.cursor_;
}

ReplayBuffer& ReplayBuffer::operator=(const ReplayBuffer& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  capacity_ = other.capacity_;
  slots_ = other.slots_;
  cursor_ = other.cursor_;
  return *this;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return slots_.size();
}

void ReplayBuffer::push(Transition t) {
  std::lock_guard lock(mutex_);
  if (slots_.size() < capacity_) {
    slots_.push_back(std::move(t));
    return;
  }
  slots_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::lock_guard lock(mutex_);
  if (slots_.empty()) throw StateError("cannot sample from an empty replay buffer");
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(slots_[uniform_index(rng, slots_.size())]);
  return out;
}

std::vector<Transition> ReplayBuffer::contents() const {
  std::lock_guard lock(mutex_);
  std::vector<Transition> out;
  out.reserve(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i)
    out.push_back(slots_[(cursor_ + i) % slots_.size()]);
  return out;
}

void ReplayBuffer::clear() {
  std::lock_guard lock(mutex_);
  slots_.clear();
  cursor_ = 0;
}

}  // namespace jetrl::rl
