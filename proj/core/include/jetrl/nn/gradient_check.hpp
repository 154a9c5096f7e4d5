#pragma once

#include <span>
#include <vector>

#include "jetrl/nn/dense_net.hpp"
#include "jetrl/nn/dueling_head.hpp"
#include "jetrl/nn/q_network.hpp"

namespace jetrl::nn {

/// Central-difference estimate of dL/dparams for L = dL_dy . f(x), one
/// parameter at a time: (L(p + h) - L(p - h)) / 2h. Throws InputError for
/// h <= 0 or non-finite h. Cost: 2 * param_count forward passes.
std::vector<double> finite_difference_gradient(const DenseNet& net,
                                               std::span<const double> x,
                                               std::span<const double> dL_dy,
                                               double h);
std::vector<double> finite_difference_gradient(const DuelingHead& head,
                                               std::span<const double> x,
                                               std::span<const double> dL_dq,
                                               double h);
std::vector<double> finite_difference_gradient(const QNetwork& net,
                                               std::span<const double> x,
                                               std::span<const double> dL_dq,
                                               double h);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps entries
/// that are zero in exact arithmetic (dead ReLU units) from dividing
/// round-off by round-off.
double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor = 1e-6);

}  // namespace jetrl::nn
