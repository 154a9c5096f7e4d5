#include "jetrl/nn/dueling_head.hpp"

#include <string>

#include "jetrl/errors.hpp"
#include "jetrl/random.hpp"

namespace jetrl::nn {

DuelingHead::DuelingHead(DenseNet trunk_net, DenseNet value_net,
                         DenseNet advantage_net)
    : trunk(std::move(trunk_net)),
      value_stream(std::move(value_net)),
      advantage_stream(std::move(advantage_net)),
      n_actions(advantage_stream.output_dim()) {
  if (value_stream.output_dim() != 1)
    throw ConfigError("dueling value stream must have one output");
  if (value_stream.input_dim() != trunk.output_dim() ||
      advantage_stream.input_dim() != trunk.output_dim())
    throw ConfigError("dueling streams must consume the trunk output (" +
                      std::to_string(trunk.output_dim()) + " features)");
  if (value_stream.layers().back().activation != Activation::identity ||
      advantage_stream.layers().back().activation != Activation::identity)
    throw ConfigError("dueling stream outputs must be linear");
}

DuelingHead DuelingHead::make(std::size_t in_dim,
                              std::span<const std::size_t> trunk_hidden,
                              std::size_t stream_hidden,
                              std::size_t n_actions, std::uint64_t seed) {
  if (trunk_hidden.empty())
    throw ConfigError("dueling trunk needs at least one hidden layer");
  std::vector<LayerSpec> trunk_layers;
  std::size_t prev = in_dim;
  for (std::size_t width : trunk_hidden) {
    trunk_layers.push_back({prev, width, Activation::relu});
    prev = width;
  }
  const std::size_t stream[] = {stream_hidden};
  return DuelingHead(
      DenseNet(std::move(trunk_layers), derive_seed(seed, 0)),
      DenseNet(mlp_layers(prev, stream, 1), derive_seed(seed, 1)),
      DenseNet(mlp_layers(prev, stream, n_actions), derive_seed(seed, 2)));
}

std::vector<double> dueling_forward(const DuelingHead& head,
                                    std::span<const double> x) {
  DuelingTape tape;
  dueling_forward(head, x, tape);
  return tape.q;
}

void dueling_forward(const DuelingHead& head, std::span<const double> x,
                     DuelingTape& tape) {
  head.trunk.forward(x, tape.trunk);
  head.value_stream.forward(tape.trunk.output(), tape.value);
  head.advantage_stream.forward(tape.trunk.output(), tape.advantage);

  const double v = tape.value.output()[0];
  const auto adv = tape.advantage.output();
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  tape.q.resize(adv.size());
  for (std::size_t a = 0; a < adv.size(); ++a) tape.q[a] = v + (adv[a] - mean);
}

void dueling_backward_accumulate(const DuelingHead& head,
                                 const DuelingTape& tape,
                                 std::span<const double> dL_dq,
                                 std::span<double> grad) {
  if (dL_dq.size() != head.n_actions)
    throw InputError("dueling backward: expected " +
                     std::to_string(head.n_actions) + " output gradients");
  if (grad.size() != head.param_count())
    throw InputError("dueling backward: gradient buffer has wrong size");

  double total = 0.0;
  for (double g : dL_dq) total += g;
  const double dv[] = {total};
  const double mean = total / static_cast<double>(head.n_actions);
  std::vector<double> da(dL_dq.begin(), dL_dq.end());
  for (double& g : da) g -= mean;

  const std::size_t nt = head.trunk.param_count();
  const std::size_t nv = head.value_stream.param_count();
  std::vector<double> dh_value;
  std::vector<double> dh_adv;
  head.value_stream.backward_accumulate(tape.value, dv, grad.subspan(nt, nv),
                                        &dh_value);
  head.advantage_stream.backward_accumulate(
      tape.advantage, da, grad.subspan(nt + nv), &dh_adv);
  for (std::size_t i = 0; i < dh_value.size(); ++i) dh_value[i] += dh_adv[i];
  head.trunk.backward_accumulate(tape.trunk, dh_value, grad.subspan(0, nt));
}

}  // namespace jetrl::nn
