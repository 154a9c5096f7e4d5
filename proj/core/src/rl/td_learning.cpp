#include "jetrl/rl/td_learning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jetrl/errors.hpp"
#include "jetrl/nn/adam.hpp"
#include "jetrl/rl/policy.hpp"

namespace jetrl::rl {
namespace {

void check_batch(std::span<const Transition> batch, const nn::QNetwork& net) {
  for (const auto& t : batch) {
    validate(t, net.n_actions());
    if (t.s.size() != net.input_dim() || t.s_next.size() != net.input_dim())
      throw InputError("transition observation size " +
                       std::to_string(t.s.size()) +
                       " does not match network input " +
                       std::to_string(net.input_dim()));
  }
}

}  // namespace

std::vector<double> td_target_vanilla(std::span<const Transition> batch,
                                      const nn::QNetwork& target) {
  check_batch(batch, target);
  std::vector<double> y;
  y.reserve(batch.size());
  nn::QTape tape;
  for (const auto& t : batch) {
    if (t.done) {
      y.push_back(t.r);
      continue;
    }
    target.forward(t.s_next, tape);
    y.push_back(t.r + t.gamma_next * *std::ranges::max_element(tape.q));
  }
  return y;
}

std::vector<double> td_target_double(std::span<const Transition> batch,
                                     const nn::QNetwork& online,
                                     const nn::QNetwork& target) {
  check_batch(batch, online);
  if (!online.same_shape(target))
    throw InputError("online and target networks differ in shape");
  std::vector<double> y;
  y.reserve(batch.size());
  nn::QTape online_tape;
  nn::QTape target_tape;
  for (const auto& t : batch) {
    if (t.done) {
      y.push_back(t.r);
      continue;
    }
    online.forward(t.s_next, online_tape);
    const std::size_t a_star = argmax(online_tape.q);
    target.forward(t.s_next, target_tape);
    y.push_back(t.r + t.gamma_next * target_tape.q[a_star]);
  }
  return y;
}

LossAndGrad q_loss_and_grad(std::span<const Transition> batch,
                            std::span<const double> y,
                            const nn::QNetwork& online, double clip_norm) {
  if (y.size() != batch.size())
    throw InputError("q_loss_and_grad: targets and batch differ in length");
  check_batch(batch, online);

  LossAndGrad out;
  out.grads.assign(online.param_count(), 0.0);
  if (batch.empty()) return out;

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<double> dq(online.n_actions(), 0.0);
  nn::QTape tape;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    online.forward(batch[i].s, tape);
    const double err = y[i] - tape.q[batch[i].a];
    loss += err * err;
    std::ranges::fill(dq, 0.0);
    dq[batch[i].a] = -2.0 * err * inv_n;
    online.backward_accumulate(tape, dq, out.grads);
  }
  out.loss = loss * inv_n;
  if (!std::isfinite(out.loss)) throw NumericError("TD loss is not finite");
  out.grad_norm = clip_norm > 0.0
                      ? nn::clip_global_norm(out.grads, clip_norm)
                      : nn::clip_global_norm(out.grads, INFINITY);
  if (!std::isfinite(out.grad_norm)) throw NumericError("TD gradient is not finite");
  return out;
}

void hard_update(nn::QNetwork& target, const nn::QNetwork& online) {
  if (!target.same_shape(online))
    throw InputError("hard_update: networks differ in shape");
  target.set_params(online.params());
}

void soft_update(nn::QNetwork& target, const nn::QNetwork& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0))
    throw InputError("soft_update: tau must lie in (0, 1]");
  if (!target.same_shape(online))
    throw InputError("soft_update: networks differ in shape");
  auto theta_t = target.params();
  const auto theta_o = online.params();
  for (std::size_t i = 0; i < theta_t.size(); ++i)
    theta_t[i] = tau * theta_o[i] + (1.0 - tau) * theta_t[i];
  target.set_params(theta_t);
}

}  // namespace jetrl::rl
