#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jetrl/random.hpp"

namespace jetrl::rl {

/// Dense Q(s, a) table, row-major by state.
class QTable {
 public:
  QTable(std::size_t n_states, std::size_t n_actions, double init = 0.0);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double& at(std::size_t s, std::size_t a);
  double at(std::size_t s, std::size_t a) const;
  double max_over_actions(std::size_t s) const;

  std::span<const double> values() const { return values_; }

  /// max |this - other| over all entries.
  double sup_distance(const QTable& other) const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> values_;
};

/// A finite MDP with expected rewards R[s][a] and transition probabilities
/// T[s][a][s'].
struct TabularMDP {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> transition;  // [s][a][s'] flattened
  std::vector<double> reward;      // [s][a] flattened
  double gamma = 0.9;

  double T(std::size_t s, std::size_t a, std::size_t s2) const {
    return transition[(s * n_actions + a) * n_states + s2];
  }
  double R(std::size_t s, std::size_t a) const { return reward[s * n_actions + a]; }

  /// Throws InputError unless every T[s][a] is a probability vector
  /// (entries >= 0, sum 1 within 1e-12) and gamma lies in [0, 1].
  void validate() const;

  /// Random dense MDP: Dirichlet(1) transitions, rewards uniform in [0, 1).
  static TabularMDP random(std::size_t n_states, std::size_t n_actions,
                           double gamma, Rng& rng);

  /// Draws s' ~ T(s, a, .).
  std::size_t sample_next(std::size_t s, std::size_t a, Rng& rng) const;
};

struct TabularTransition {
  std::size_t s = 0;
  std::size_t a = 0;
  double r = 0.0;
  std::size_t s_next = 0;
  bool done = false;
};

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); the bootstrap
/// term is dropped for terminal transitions.
void tabular_q_update(QTable& q, const TabularTransition& t, double alpha,
                      double gamma);

/// One in-place (Gauss-Seidel) sweep of expected Q-learning updates over all
/// (s, a): Q(s,a) += alpha * (R + gamma * sum_s' T max Q(s', .) - Q(s,a)).
void expected_q_sweep(QTable& q, const TabularMDP& mdp, double alpha);

/// sup_{s,a} |R + gamma * sum T max Q - Q|.
double bellman_residual(const QTable& q, const TabularMDP& mdp);

/// Fixed point of the Bellman optimality operator by synchronous value
/// iteration. Stops once the Bellman residual is below tol; throws
/// NumericError after max_iterations.
QTable value_iteration_oracle(const TabularMDP& mdp, double tol,
                              std::size_t max_iterations = 1'000'000);

/// sum_k gamma^k r_k.
double discounted_return(std::span<const double> rewards, double gamma);

}  // namespace jetrl::rl
