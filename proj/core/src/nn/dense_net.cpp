#include "jetrl/nn/dense_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jetrl/errors.hpp"
#include "jetrl/random.hpp"

namespace jetrl::nn {

const char* to_string(Activation act) noexcept {
  return act == Activation::relu ? "relu" : "identity";
}

Activation activation_from_string(const std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::size_t param_count(std::span<const LayerSpec> layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.in_dim * l.out_dim + l.out_dim;
  return n;
}

std::vector<LayerSpec> mlp_layers(std::size_t in_dim,
                                  std::span<const std::size_t> hidden,
                                  std::size_t out_dim, Activation output) {
  std::vector<LayerSpec> layers;
  std::size_t prev = in_dim;
  for (std::size_t width : hidden) {
    layers.push_back({prev, width, Activation::relu});
    prev = width;
  }
  layers.push_back({prev, out_dim, output});
  return layers;
}

DenseNet::DenseNet(std::vector<LayerSpec> layers, std::uint64_t seed)
    : layers_(std::move(layers)), seed_(seed) {
  if (layers_.empty()) throw ConfigError("network needs at least one layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.in_dim == 0 || l.out_dim == 0)
      throw ConfigError("layer " + std::to_string(k) + " has a zero dimension");
    if (k > 0 && l.in_dim != layers_[k - 1].out_dim)
      throw ConfigError("layer " + std::to_string(k) + " expects in_dim " +
                        std::to_string(l.in_dim) + " but layer " +
                        std::to_string(k - 1) + " produces " +
                        std::to_string(layers_[k - 1].out_dim));
  }

  Rng rng(seed);
  params_.assign(nn::param_count(layers_), 0.0);
  std::size_t offset = 0;
  for (const auto& l : layers_) {
    offsets_.push_back(offset);
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in_dim));
    for (std::size_t i = 0; i < l.in_dim * l.out_dim; ++i)
      params_[offset + i] = uniform_real(rng, -bound, bound);
    offset += l.in_dim * l.out_dim + l.out_dim;  // biases stay zero
  }
}

void DenseNet::set_params(std::span<const double> values) {
  if (values.size() != params_.size())
    throw InputError("set_params: expected " + std::to_string(params_.size()) +
                     " values, got " + std::to_string(values.size()));
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("set_params: non-finite value");
  std::copy(values.begin(), values.end(), params_.begin());
}

void DenseNet::check_input(std::span<const double> x) const {
  if (layers_.empty()) throw StateError("network is not initialized");
  if (x.size() != input_dim())
    throw InputError("forward: expected input of size " +
                     std::to_string(input_dim()) + ", got " +
                     std::to_string(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw InputError("forward: non-finite input");
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
  Tape tape;
  forward(x, tape);
  return tape.post.back();
}

void DenseNet::forward(std::span<const double> x, Tape& tape) const {
  check_input(x);
  tape.input.assign(x.begin(), x.end());
  tape.pre.resize(layers_.size());
  tape.post.resize(layers_.size());

  std::span<const double> in = tape.input;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    const double* w = params_.data() + offsets_[k];
    const double* b = w + l.in_dim * l.out_dim;
    auto& z = tape.pre[k];
    auto& a = tape.post[k];
    z.resize(l.out_dim);
    a.resize(l.out_dim);
    for (std::size_t i = 0; i < l.out_dim; ++i) {
      const double* row = w + i * l.in_dim;
      double acc = b[i];
      for (std::size_t j = 0; j < l.in_dim; ++j) acc += row[j] * in[j];
      z[i] = acc;
      a[i] = (l.activation == Activation::relu && acc < 0.0) ? 0.0 : acc;
    }
    in = a;
  }
}

std::vector<double> DenseNet::backward(std::span<const double> x,
                                       std::span<const double> dL_dy) const {
  Tape tape;
  forward(x, tape);
  std::vector<double> grad(params_.size(), 0.0);
  backward_accumulate(tape, dL_dy, grad);
  return grad;
}

void DenseNet::backward_accumulate(const Tape& tape,
                                   std::span<const double> dL_dy,
                                   std::span<double> grad,
                                   std::vector<double>* dL_dx) const {
  if (dL_dy.size() != output_dim())
    throw InputError("backward: expected output gradient of size " +
                     std::to_string(output_dim()) + ", got " +
                     std::to_string(dL_dy.size()));
  if (grad.size() != params_.size())
    throw InputError("backward: gradient buffer has wrong size");
  if (tape.pre.size() != layers_.size())
    throw InputError("backward: tape does not match network");

  delta_.assign(dL_dy.begin(), dL_dy.end());
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& l = layers_[k];
    if (l.activation == Activation::relu)
      for (std::size_t i = 0; i < l.out_dim; ++i)
        if (tape.pre[k][i] <= 0.0) delta_[i] = 0.0;

    std::span<const double> in =
        k == 0 ? std::span<const double>(tape.input)
               : std::span<const double>(tape.post[k - 1]);
    const double* w = params_.data() + offsets_[k];
    double* gw = grad.data() + offsets_[k];
    double* gb = gw + l.in_dim * l.out_dim;
    for (std::size_t i = 0; i < l.out_dim; ++i) {
      const double d = delta_[i];
      gb[i] += d;
      if (d == 0.0) continue;
      double* grow = gw + i * l.in_dim;
      for (std::size_t j = 0; j < l.in_dim; ++j) grow[j] += d * in[j];
    }

    if (k == 0 && dL_dx == nullptr) break;
    delta_prev_.assign(l.in_dim, 0.0);
    for (std::size_t i = 0; i < l.out_dim; ++i) {
      const double d = delta_[i];
      if (d == 0.0) continue;
      const double* row = w + i * l.in_dim;
      for (std::size_t j = 0; j < l.in_dim; ++j) delta_prev_[j] += d * row[j];
    }
    delta_.swap(delta_prev_);
  }
  if (dL_dx != nullptr) *dL_dx = delta_;
}

bool DenseNet::all_finite() const {
  return std::all_of(params_.begin(), params_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace jetrl::nn
