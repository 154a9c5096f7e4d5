#include "jetrl/rl/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jetrl/errors.hpp"

namespace jetrl::rl {

QTable::QTable(std::size_t n_states, std::size_t n_actions, double init)
    : n_states_(n_states),
      n_actions_(n_actions),
      values_(n_states * n_actions, init) {
  if (n_states == 0 || n_actions == 0)
    throw InputError("Q table needs at least one state and one action");
}

double& QTable::at(std::size_t s, std::size_t a) {
  if (s >= n_states_ || a >= n_actions_)
    throw InputError("Q table index (" + std::to_string(s) + ", " +
                     std::to_string(a) + ") out of range");
  return values_[s * n_actions_ + a];
}

double QTable::at(std::size_t s, std::size_t a) const {
  return const_cast<QTable*>(this)->at(s, a);
}

double QTable::max_over_actions(std::size_t s) const {
  if (s >= n_states_) throw InputError("Q table state out of range");
  const auto row = std::span(values_).subspan(s * n_actions_, n_actions_);
  return *std::ranges::max_element(row);
}

double QTable::sup_distance(const QTable& other) const {
  if (other.n_states_ != n_states_ || other.n_actions_ != n_actions_)
    throw InputError("Q tables differ in shape");
  double d = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    d = std::max(d, std::abs(values_[i] - other.values_[i]));
  return d;
}

void TabularMDP::validate() const {
  if (n_states == 0 || n_actions == 0) throw InputError("empty MDP");
  if (transition.size() != n_states * n_actions * n_states ||
      reward.size() != n_states * n_actions)
    throw InputError("MDP tables have inconsistent sizes");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("MDP gamma outside [0, 1]");
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (std::size_t s2 = 0; s2 < n_states; ++s2) {
        const double p = T(s, a, s2);
        if (!(p >= 0.0)) throw InputError("negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw InputError("transition probabilities do not sum to one");
    }
}

TabularMDP TabularMDP::random(std::size_t n_states, std::size_t n_actions,
                              double gamma, Rng& rng) {
  TabularMDP mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.transition.resize(n_states * n_actions * n_states);
  mdp.reward.resize(n_states * n_actions);
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    double sum = 0.0;
    for (std::size_t s2 = 0; s2 < n_states; ++s2) {
      double u = uniform01(rng);
      while (u <= 0.0) u = uniform01(rng);
      const double w = -std::log(u);  // Exp(1) -> Dirichlet(1) after normalizing
      mdp.transition[sa * n_states + s2] = w;
      sum += w;
    }
    for (std::size_t s2 = 0; s2 < n_states; ++s2)
      mdp.transition[sa * n_states + s2] /= sum;
    mdp.reward[sa] = uniform01(rng);
  }
  return mdp;
}

std::size_t TabularMDP::sample_next(std::size_t s, std::size_t a, Rng& rng) const {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t s2 = 0; s2 < n_states; ++s2) {
    acc += T(s, a, s2);
    if (u < acc) return s2;
  }
  return n_states - 1;
}

void tabular_q_update(QTable& q, const TabularTransition& t, double alpha,
                      double gamma) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InputError("tabular_q_update: alpha must lie in (0, 1]");
  if (t.s_next >= q.n_states())
    throw InputError("tabular_q_update: next state out of range");
  const double bootstrap = t.done ? 0.0 : gamma * q.max_over_actions(t.s_next);
  double& entry = q.at(t.s, t.a);
  entry += alpha * (t.r + bootstrap - entry);
}

namespace {

double expected_backup(const QTable& q, const TabularMDP& mdp, std::size_t s,
                       std::size_t a) {
  double next = 0.0;
  for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2)
    next += mdp.T(s, a, s2) * q.max_over_actions(s2);
  return mdp.R(s, a) + mdp.gamma * next;
}

void check_shapes(const QTable& q, const TabularMDP& mdp) {
  if (q.n_states() != mdp.n_states || q.n_actions() != mdp.n_actions)
    throw InputError("Q table and MDP differ in shape");
}

}  // namespace

void expected_q_sweep(QTable& q, const TabularMDP& mdp, double alpha) {
  check_shapes(q, mdp);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InputError("expected_q_sweep: alpha must lie in (0, 1]");
  for (std::size_t s = 0; s < mdp.n_states; ++s)
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      double& entry = q.at(s, a);
      entry += alpha * (expected_backup(q, mdp, s, a) - entry);
    }
}

double bellman_residual(const QTable& q, const TabularMDP& mdp) {
  check_shapes(q, mdp);
  double res = 0.0;
  for (std::size_t s = 0; s < mdp.n_states; ++s)
    for (std::size_t a = 0; a < mdp.n_actions; ++a)
      res = std::max(res, std::abs(expected_backup(q, mdp, s, a) - q.at(s, a)));
  return res;
}

QTable value_iteration_oracle(const TabularMDP& mdp, double tol,
                              std::size_t max_iterations) {
  mdp.validate();
  if (!(tol > 0.0)) throw InputError("value iteration tolerance must be positive");
  QTable q(mdp.n_states, mdp.n_actions);
  QTable next(mdp.n_states, mdp.n_actions);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (bellman_residual(q, mdp) < tol) return q;
    for (std::size_t s = 0; s < mdp.n_states; ++s)
      for (std::size_t a = 0; a < mdp.n_actions; ++a)
        next.at(s, a) = expected_backup(q, mdp, s, a);
    std::swap(q, next);
  }
  throw NumericError("value iteration did not converge within " +
                     std::to_string(max_iterations) + " iterations");
}

double discounted_return(std::span<const double> rewards, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw InputError("discounted_return: gamma outside [0, 1]");
  double g = 0.0;
  for (std::size_t k = rewards.size(); k-- > 0;) g = rewards[k] + gamma * g;
  return g;
}

}  // namespace jetrl::rl
