#include "jetrl/nn/q_network.hpp"

#include <algorithm>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::nn {

QNetwork::QNetwork(DenseNet net) : impl_(std::move(net)) {
  if (dense().layers().back().activation != Activation::identity)
    throw ConfigError("Q-network output layer must be linear");
}

QNetwork::QNetwork(DuelingHead head) : impl_(std::move(head)) {}

QNetwork QNetwork::plain(std::size_t in_dim,
                         std::span<const std::size_t> hidden,
                         std::size_t n_actions, std::uint64_t seed) {
  return QNetwork(DenseNet(mlp_layers(in_dim, hidden, n_actions), seed));
}

QNetwork QNetwork::dueling(std::size_t in_dim,
                           std::span<const std::size_t> trunk_hidden,
                           std::size_t stream_hidden, std::size_t n_actions,
                           std::uint64_t seed) {
  return QNetwork(
      DuelingHead::make(in_dim, trunk_hidden, stream_hidden, n_actions, seed));
}

std::size_t QNetwork::input_dim() const {
  return is_dueling() ? head().input_dim() : dense().input_dim();
}

std::size_t QNetwork::n_actions() const {
  return is_dueling() ? head().n_actions : dense().output_dim();
}

std::size_t QNetwork::param_count() const {
  return is_dueling() ? head().param_count() : dense().param_count();
}

std::vector<double> QNetwork::params() const {
  std::vector<double> out(param_count());
  params_into(out);
  return out;
}

void QNetwork::params_into(std::span<double> out) const {
  if (out.size() != param_count())
    throw InputError("params_into: buffer has wrong size");
  if (!is_dueling()) {
    std::ranges::copy(dense().params(), out.begin());
    return;
  }
  auto it = out.begin();
  it = std::ranges::copy(head().trunk.params(), it).out;
  it = std::ranges::copy(head().value_stream.params(), it).out;
  std::ranges::copy(head().advantage_stream.params(), it);
}

void QNetwork::set_params(std::span<const double> values) {
  if (values.size() != param_count())
    throw InputError("set_params: expected " + std::to_string(param_count()) +
                     " values, got " + std::to_string(values.size()));
  if (!is_dueling()) {
    std::get<DenseNet>(impl_).set_params(values);
    return;
  }
  auto& h = std::get<DuelingHead>(impl_);
  const std::size_t nt = h.trunk.param_count();
  const std::size_t nv = h.value_stream.param_count();
  h.trunk.set_params(values.subspan(0, nt));
  h.value_stream.set_params(values.subspan(nt, nv));
  h.advantage_stream.set_params(values.subspan(nt + nv));
}

bool QNetwork::same_shape(const QNetwork& other) const {
  if (is_dueling() != other.is_dueling()) return false;
  if (!is_dueling()) return dense().layers() == other.dense().layers();
  return head().trunk.layers() == other.head().trunk.layers() &&
         head().value_stream.layers() == other.head().value_stream.layers() &&
         head().advantage_stream.layers() ==
             other.head().advantage_stream.layers();
}

std::vector<double> QNetwork::q_values(std::span<const double> x) const {
  if (is_dueling()) return dueling_forward(head(), x);
  return dense().forward(x);
}

void QNetwork::forward(std::span<const double> x, QTape& tape) const {
  if (is_dueling()) {
    dueling_forward(head(), x, tape.dueling);
    tape.q = tape.dueling.q;
  } else {
    dense().forward(x, tape.plain);
    tape.q = tape.plain.output();
  }
}

void QNetwork::backward_accumulate(const QTape& tape,
                                   std::span<const double> dL_dq,
                                   std::span<double> grad) const {
  if (is_dueling())
    dueling_backward_accumulate(head(), tape.dueling, dL_dq, grad);
  else
    dense().backward_accumulate(tape.plain, dL_dq, grad);
}

}  // namespace jetrl::nn
