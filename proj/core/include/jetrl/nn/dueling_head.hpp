#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jetrl/nn/dense_net.hpp"

namespace jetrl::nn {

/// Q(s, a) = V(s) + A(s, a) - mean_a' A(s, a').
///
/// The trunk is shared; the value stream ends in one unit and the advantage
/// stream in one unit per action. Both streams read the trunk output.
struct DuelingHead {
  DenseNet trunk;
  DenseNet value_stream;
  DenseNet advantage_stream;
  std::size_t n_actions = 0;

  DuelingHead() = default;
  DuelingHead(DenseNet trunk_net, DenseNet value_net, DenseNet advantage_net);

  /// trunk: in -> trunk_hidden (all ReLU); each stream: one ReLU layer of
  /// `stream_hidden` units, then its linear output.
  static DuelingHead make(std::size_t in_dim,
                          std::span<const std::size_t> trunk_hidden,
                          std::size_t stream_hidden, std::size_t n_actions,
                          std::uint64_t seed);

  std::size_t input_dim() const { return trunk.input_dim(); }
  std::size_t param_count() const {
    return trunk.param_count() + value_stream.param_count() +
           advantage_stream.param_count();
  }

  bool operator==(const DuelingHead&) const = default;
};

struct DuelingTape {
  Tape trunk;
  Tape value;
  Tape advantage;
  std::vector<double> q;
};

std::vector<double> dueling_forward(const DuelingHead& head,
                                    std::span<const double> x);
void dueling_forward(const DuelingHead& head, std::span<const double> x,
                     DuelingTape& tape);

/// Accumulates dL/d(xi, eta, psi) into `grad`, laid out trunk | value |
/// advantage.
void dueling_backward_accumulate(const DuelingHead& head,
                                 const DuelingTape& tape,
                                 std::span<const double> dL_dq,
                                 std::span<double> grad);

}  // namespace jetrl::nn
