#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace jetrl::nn {

enum class Activation { relu, identity };

const char* to_string(Activation act) noexcept;
Activation activation_from_string(const std::string_view name);

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::identity;

  bool operator==(const LayerSpec&) const = default;
};

/// Total parameter count of a layer chain: sum of in*out + out.
std::size_t param_count(std::span<const LayerSpec> layers);

/// Builds the conventional chain in -> hidden... -> out, ReLU on hidden
/// layers and identity on the output.
std::vector<LayerSpec> mlp_layers(std::size_t in_dim,
                                  std::span<const std::size_t> hidden,
                                  std::size_t out_dim,
                                  Activation output = Activation::identity);

/// Activations recorded by a forward pass, reused by backward passes.
/// `pre[k]` holds layer k pre-activations, `post[k]` its outputs;
/// `input` is a copy of the network input.
struct Tape {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;

  std::span<const double> output() const { return post.back(); }
};

/// Fully connected feed-forward network with a flat parameter vector.
///
/// Parameters are stored layer by layer; inside a layer the weight matrix
/// comes first (row-major, out_dim x in_dim) followed by the bias vector.
/// Weights are drawn uniformly from [-1/sqrt(in_dim), 1/sqrt(in_dim)] and
/// biases start at zero.
class DenseNet {
 public:
  DenseNet() = default;
  DenseNet(std::vector<LayerSpec> layers, std::uint64_t seed);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t input_dim() const { return layers_.front().in_dim; }
  std::size_t output_dim() const { return layers_.back().out_dim; }

  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }
  std::size_t param_count() const { return params_.size(); }

  /// Replaces all parameters; throws InputError on length mismatch or
  /// non-finite values.
  void set_params(std::span<const double> values);

  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, Tape& tape) const;

  /// Gradient of L w.r.t. params given dL/dy at input x.
  std::vector<double> backward(std::span<const double> x,
                               std::span<const double> dL_dy) const;

  /// Adds dL/dparams into `grad` using a tape from forward(x, tape). When
  /// `dL_dx` is non-null it receives dL/dinput.
  void backward_accumulate(const Tape& tape, std::span<const double> dL_dy,
                           std::span<double> grad,
                           std::vector<double>* dL_dx = nullptr) const;

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + layers_[layer].in_dim * layers_[layer].out_dim;
  }

  bool all_finite() const;

  bool operator==(const DenseNet& other) const {
    return layers_ == other.layers_ && params_ == other.params_;
  }

 private:
  void check_input(std::span<const double> x) const;

  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  std::uint64_t seed_ = 0;
  // scratch for backward passes; grows once and is reused
  mutable std::vector<double> delta_;
  mutable std::vector<double> delta_prev_;
};

}  // namespace jetrl::nn
