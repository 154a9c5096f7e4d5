#include "jetrl/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "jetrl/errors.hpp"

namespace jetrl::nn {

namespace {

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw InputError("finite-difference step must be positive and finite");
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InputError("dL/dy has size " + std::to_string(b.size()) + ", output has " +
                     std::to_string(a.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Perturbs a copy of the model through get/set of its flat parameters.
template <class Model, class Eval>
std::vector<double> central_difference(const Model& model, std::vector<double> params,
                                       double h, Eval&& eval) {
  Model probe = model;
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double p0 = params[i];
    params[i] = p0 + h;
    probe.set_params(params);
    const double up = eval(probe);
    params[i] = p0 - h;
    probe.set_params(params);
    const double down = eval(probe);
    params[i] = p0;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace

std::vector<double> finite_difference_gradient(const DenseNet& net,
                                               std::span<const double> x,
                                               std::span<const double> dL_dy, double h) {
  check_step(h);
  const auto p = net.params();
  return central_difference(net, std::vector<double>(p.begin(), p.end()), h,
                            [&](const DenseNet& n) { return dot(n.forward(x), dL_dy); });
}

std::vector<double> finite_difference_gradient(const QNetwork& net,
                                               std::span<const double> x,
                                               std::span<const double> dL_dq, double h) {
  check_step(h);
  return central_difference(net, net.params(), h,
                            [&](const QNetwork& n) { return dot(n.q_values(x), dL_dq); });
}

std::vector<double> finite_difference_gradient(const DuelingHead& head,
                                               std::span<const double> x,
                                               std::span<const double> dL_dq, double h) {
  return finite_difference_gradient(QNetwork(head), x, dL_dq, h);
}

double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor) {
  if (a.size() != b.size()) throw InputError("gradient vectors differ in length");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace jetrl::nn
