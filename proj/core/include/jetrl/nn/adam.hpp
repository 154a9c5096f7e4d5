#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace jetrl::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  AdamConfig config;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg)
      : m(n, 0.0), v(n, 0.0), config(cfg) {}

  bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam step, in place.
///
/// Throws NumericError (and leaves params and state untouched) when any
/// gradient entry is non-finite. An all-zero gradient still advances the
/// moments and the step counter but leaves params unchanged.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state);

/// Scales g so that its Euclidean norm is at most max_norm. Returns the
/// norm before clipping.
double clip_global_norm(std::span<double> g, double max_norm);

}  // namespace jetrl::nn
