#include "jetrl/nn/adam.hpp"

#include <algorithm>
#include <cmath>

#include "jetrl/errors.hpp"

namespace jetrl::nn {

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& st) {
  const std::size_t n = params.size();
  if (grads.size() != n || st.m.size() != n || st.v.size() != n)
    throw InputError("adam_step: params, grads and moments differ in length");
  bool all_zero = true;
  for (double g : grads) {
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
    if (g != 0.0) all_zero = false;
  }

  const auto& c = st.config;
  st.t += 1;
  const double t = static_cast<double>(st.t);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    st.m[i] = c.beta1 * st.m[i] + (1.0 - c.beta1) * g;
    st.v[i] = c.beta2 * st.v[i] + (1.0 - c.beta2) * g * g;
  }
  if (all_zero) return;
  for (std::size_t i = 0; i < n; ++i) {
    const double m_hat = st.m[i] / bc1;
    const double v_hat = st.v[i] / bc2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps_hat);
  }
}

double clip_global_norm(std::span<double> g, double max_norm) {
  double sq = 0.0;
  for (double x : g) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double& x : g) x *= scale;
  }
  return norm;
}

}  // namespace jetrl::nn
