#pragma once

#include <span>
#include <vector>

#include "jetrl/nn/q_network.hpp"
#include "jetrl/rl/transition.hpp"

namespace jetrl::rl {

/// y = r + gamma_next * max_a' Q_target(s', a'); terminal => y = r.
std::vector<double> td_target_vanilla(std::span<const Transition> batch,
                                      const nn::QNetwork& target);

/// y = r + gamma_next * Q_target(s', argmax_a' Q_online(s', a')).
std::vector<double> td_target_double(std::span<const Transition> batch,
                                     const nn::QNetwork& online,
                                     const nn::QNetwork& target);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grads;  // same layout as QNetwork::params()
  double grad_norm = 0.0;     // before clipping
};

inline constexpr double kDefaultGradClip = 10.0;

/// Mean squared TD error over the batch and its gradient w.r.t. the online
/// parameters. Targets are constants. The gradient is clipped to global norm
/// `clip_norm` (pass 0 to disable). Non-finite loss raises NumericError.
LossAndGrad q_loss_and_grad(std::span<const Transition> batch,
                            std::span<const double> y,
                            const nn::QNetwork& online,
                            double clip_norm = kDefaultGradClip);

/// target <- online (exact copy).
void hard_update(nn::QNetwork& target, const nn::QNetwork& online);

/// target <- tau * online + (1 - tau) * target, tau in (0, 1].
void soft_update(nn::QNetwork& target, const nn::QNetwork& online, double tau);

}  // namespace jetrl::rl
