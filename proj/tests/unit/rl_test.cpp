#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "jetrl/errors.hpp"
#include "jetrl/nn/gradient_check.hpp"
#include "jetrl/random.hpp"
#include "jetrl/rl/agent.hpp"
#include "jetrl/rl/policy.hpp"
#include "jetrl/rl/replay_buffer.hpp"
#include "jetrl/rl/tabular.hpp"
#include "jetrl/rl/td_learning.hpp"
#include "oracles.hpp"
#include "tabular_runs.hpp"

using namespace jetrl;
using namespace jetrl::rl;

namespace {

/// Network whose output ignores its (1-d) input: zero weights, bias = q.
nn::QNetwork constant_net(std::vector<double> q) {
  nn::DenseNet net({{1, q.size(), nn::Activation::identity}}, 0);
  auto p = net.mutable_params();
  std::fill(p.begin(), p.end(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) p[net.bias_offset(0) + i] = q[i];
  return nn::QNetwork(std::move(net));
}

Transition tr(double r, double gamma_next, std::size_t a = 0, std::size_t dim = 1) {
  Transition t;
  t.s.assign(dim, 0.25);
  t.s_next.assign(dim, -0.5);
  t.a = a;
  t.r = r;
  t.gamma_next = gamma_next;
  t.done = gamma_next == 0.0;
  return t;
}

Transition tagged(double r) { return tr(r, 0.9); }

}  // namespace

TEST_CASE("argmax and epsilon-greedy selection") {
  Rng rng(7);
  const std::vector<double> q{0.1, 0.9};
  for (int i = 0; i < 1000; ++i) CHECK(select_action(q, 0.0, rng) == 1);

  const std::vector<double> tie{0.5, 0.5};
  CHECK(select_action(tie, 0.0, rng) == 0);
  CHECK(argmax(std::vector<double>{3.0, 1.0, 3.0}) == 0);

  CHECK_THROWS_AS(select_action(std::vector<double>{}, 0.1, rng), InputError);
  CHECK_THROWS_AS(select_action(std::vector<double>{0.0, NAN}, 0.1, rng), InputError);
  CHECK_THROWS_AS(select_action(q, 1.5, rng), InputError);
}

TEST_CASE("eps = 1 picks actions uniformly") {
  Rng rng(11);
  const std::size_t n_actions = 4, draws = 100'000;
  std::vector<double> q{5.0, 1.0, 0.0, -2.0};
  std::vector<std::size_t> counts(n_actions, 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[select_action(q, 1.0, rng)];
  const double p = 1.0 / n_actions;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (auto c : counts) CHECK(std::abs(static_cast<double>(c) - mean) < 3 * sigma);
}

TEST_CASE("selection is deterministic given the rng state") {
  Rng a(99), b(99);
  std::vector<double> q{0.2, 0.1, 0.4};
  for (int i = 0; i < 500; ++i) CHECK(select_action(q, 0.3, a) == select_action(q, 0.3, b));
}

TEST_CASE("epsilon schedule decays linearly then holds") {
  EpsilonSchedule s{1.0, 0.05, 100};
  CHECK(s.value(0) == doctest::Approx(1.0));
  CHECK(s.value(50) == doctest::Approx(0.525));
  CHECK(s.value(100) == doctest::Approx(0.05));
  CHECK(s.value(10'000) == doctest::Approx(0.05));
  CHECK_THROWS_AS((EpsilonSchedule{1.0, 0.05, 0}.validate()), ConfigError);
}

TEST_CASE("replay buffer keeps the newest transitions") {
  ReplayBuffer buf(3);
  buf.push(tagged(0));
  CHECK(buf.size() == 1);
  for (int i = 1; i < 5; ++i) buf.push(tagged(i));
  CHECK(buf.size() == 3);
  const auto c = buf.contents();
  REQUIRE(c.size() == 3);
  CHECK(c[0].r == 2);
  CHECK(c[1].r == 3);
  CHECK(c[2].r == 4);
  CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
}

TEST_CASE("replay sampling edge cases") {
  Rng rng(1);
  ReplayBuffer buf(8);
  CHECK_THROWS_AS(buf.sample(1, rng), StateError);
  buf.push(tagged(42));
  const auto four = buf.sample(4, rng);
  REQUIRE(four.size() == 4);
  for (const auto& t : four) CHECK(t.r == 42);
  CHECK(buf.sample(0, rng).empty());
}

TEST_CASE("interleaved push and sample only return pushed transitions") {
  Rng rng(5);
  for (std::size_t cap = 1; cap <= 8; ++cap) {
    ReplayBuffer buf(cap);
    std::vector<double> pushed;
    for (int step = 0; step < 400; ++step) {
      if (buf.empty() || uniform01(rng) < 0.5) {
        pushed.push_back(step);
        buf.push(tagged(step));
      } else {
        // Only the last `cap` pushes may come back.
        const std::set<double> live(pushed.end() - std::min(pushed.size(), cap), pushed.end());
        for (const auto& t : buf.sample(1 + uniform_index(rng, 5), rng))
          CHECK(live.count(t.r) == 1);
      }
    }
  }
}

TEST_CASE("replay sampling is uniform (chi-square, alpha 0.01)") {
  Rng rng(2024);
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(tagged(i));
  const std::size_t n = 100'000;
  std::vector<double> counts(10, 0.0);
  for (const auto& t : buf.sample(n, rng)) counts[static_cast<std::size_t>(t.r)] += 1;
  double chi2 = 0.0;
  const double expected = n / 10.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 21.666);  // chi-square 0.99 quantile, 9 dof
}

TEST_CASE("replay sampling is deterministic and copies are independent") {
  ReplayBuffer buf(16);
  for (int i = 0; i < 16; ++i) buf.push(tagged(i));
  Rng a(3), b(3);
  CHECK(buf.sample(32, a) == buf.sample(32, b));
  ReplayBuffer copy = buf;
  copy.push(tagged(100));
  CHECK(buf.contents().front().r == 0);
  CHECK(copy.contents().front().r == 1);
}

TEST_CASE("transition invariants") {
  CHECK_NOTHROW(validate(tr(1, 0.9), 2));
  CHECK_NOTHROW(validate(tr(1, 0.0), 2));
  auto bad = tr(1, 0.0);
  bad.done = false;
  CHECK_THROWS_AS(validate(bad, 2), InputError);
  auto bad2 = tr(1, 0.9);
  bad2.done = true;
  CHECK_THROWS_AS(validate(bad2, 2), InputError);
  CHECK_THROWS_AS(validate(tr(1, 1.5), 2), InputError);
  CHECK_THROWS_AS(validate(tr(1, 0.9, 2), 2), InputError);
  CHECK_THROWS_AS(validate(tr(NAN, 0.9), 2), InputError);
}

TEST_CASE("vanilla TD targets") {
  const auto target = constant_net({0.5, 0.3});
  std::vector<Transition> batch{tr(1, 0.9), tr(1, 0.0)};
  const auto y = td_target_vanilla(batch, target);
  CHECK(y[0] == doctest::Approx(1.45).epsilon(1e-15));
  CHECK(y[1] == 1.0);

  auto forbidden = tr(1, 0.0);
  forbidden.done = false;
  std::vector<Transition> bad{forbidden};
  CHECK_THROWS_AS(td_target_vanilla(bad, target), InputError);

  std::vector<Transition> wrong_dim{tr(1, 0.9, 0, 3)};
  CHECK_THROWS_AS(td_target_vanilla(wrong_dim, target), InputError);
}

TEST_CASE("double TD targets") {
  const auto online = constant_net({0.2, 0.8});
  const auto target = constant_net({0.5, 0.3});
  std::vector<Transition> batch{tr(1, 0.9), tr(2, 0.0)};
  const auto y = td_target_double(batch, online, target);
  CHECK(y[0] == doctest::Approx(1.27).epsilon(1e-15));
  CHECK(y[1] == 2.0);
}

TEST_CASE("double equals vanilla when target = online and argmax is unique") {
  Rng rng(17);
  int checked = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t dim = 1 + uniform_index(rng, 4), n_act = 2 + uniform_index(rng, 4);
    const nn::QNetwork net = uniform01(rng) < 0.5
                                 ? nn::QNetwork(testing::random_net(rng, dim, n_act))
                                 : nn::QNetwork(testing::random_dueling(rng, dim, n_act));
    std::vector<Transition> batch;
    for (int i = 0; i < 8; ++i) {
      Transition t;
      t.s = testing::random_vector(rng, dim);
      t.s_next = testing::random_vector(rng, dim);
      t.a = uniform_index(rng, n_act);
      t.r = uniform_real(rng, -1, 1);
      t.gamma_next = 0.9;
      auto q = net.q_values(t.s_next);
      std::sort(q.begin(), q.end());
      if (q[q.size() - 1] == q[q.size() - 2]) continue;
      batch.push_back(t);
    }
    const auto yd = td_target_double(batch, net, net);
    const auto yv = td_target_vanilla(batch, net);
    CHECK(yd == yv);
    checked += static_cast<int>(batch.size());
  }
  CHECK(checked > 1000);
}

TEST_CASE("loss is zero when targets match predictions") {
  Rng rng(23);
  const nn::QNetwork net(testing::random_net(rng, 3, 4));
  std::vector<Transition> batch;
  std::vector<double> y;
  for (int i = 0; i < 5; ++i) {
    Transition t = tr(0, 0.9, uniform_index(rng, 4), 3);
    t.s = testing::random_vector(rng, 3);
    y.push_back(net.q_values(t.s)[t.a]);
    batch.push_back(t);
  }
  const auto lg = q_loss_and_grad(batch, y, net);
  CHECK(lg.loss == 0.0);
  for (double g : lg.grads) CHECK(g == 0.0);
  CHECK_THROWS_AS(q_loss_and_grad(batch, std::vector<double>(4, 0.0), net), InputError);
}

TEST_CASE("loss on a scalar toy net matches hand evaluation") {
  // Q(s) = w * s + b with a single action.
  nn::DenseNet dense({{1, 1, nn::Activation::identity}}, 0);
  dense.set_params(std::vector<double>{2.0, 0.5});
  const nn::QNetwork net(dense);
  Transition t = tr(0, 0.9);
  t.s = {1.5};
  const std::vector<Transition> batch{t};
  const std::vector<double> y{4.0};
  const auto lg = q_loss_and_grad(batch, y, net, 0.0);
  // Q = 3.5, error 0.5 -> loss 0.25; dL/dw = -2 * 0.5 * 1.5, dL/db = -2 * 0.5.
  CHECK(lg.loss == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(lg.grads[0] == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(lg.grads[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("loss gradient matches finite differences") {
  Rng rng(31);
  double worst = 0.0;
  for (int c = 0; c < 40; ++c) {
    const std::size_t dim = 1 + uniform_index(rng, 3), n_act = 2 + uniform_index(rng, 3);
    const nn::QNetwork net = c % 2 ? nn::QNetwork(testing::random_net(rng, dim, n_act))
                                   : nn::QNetwork(testing::random_dueling(rng, dim, n_act));
    std::vector<Transition> batch;
    std::vector<double> y;
    for (int i = 0; i < 4; ++i) {
      Transition t = tr(0, 0.9, uniform_index(rng, n_act), dim);
      t.s = testing::random_vector(rng, dim);
      batch.push_back(t);
      y.push_back(uniform_real(rng, -2, 2));
    }
    const auto lg = q_loss_and_grad(batch, y, net, 0.0);
    // Central differences of the loss itself.
    const double h = 1e-6;
    auto p = net.params();
    nn::QNetwork probe = net;
    std::vector<double> fd(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double p0 = p[i];
      p[i] = p0 + h;
      probe.set_params(p);
      const double up = q_loss_and_grad(batch, y, probe, 0.0).loss;
      p[i] = p0 - h;
      probe.set_params(p);
      const double down = q_loss_and_grad(batch, y, probe, 0.0).loss;
      p[i] = p0;
      fd[i] = (up - down) / (2 * h);
    }
    // Skip cases where some sample sits on a ReLU kink.
    bool near_kink = false;
    for (const auto& t : batch) {
      const double m = net.is_dueling() ? testing::reference_dueling(net.head(), t.s).relu_margin
                                        : testing::reference_forward(net.dense(), t.s).relu_margin;
      near_kink = near_kink || m < testing::kKinkMargin;
    }
    if (near_kink) continue;
    worst = std::max(worst, nn::max_relative_error(lg.grads, fd, 1e-6));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("gradient is clipped to global norm 10") {
  nn::DenseNet dense({{1, 1, nn::Activation::identity}}, 0);
  dense.set_params(std::vector<double>{0.0, 0.0});
  const nn::QNetwork net(dense);
  Transition t = tr(0, 0.9);
  t.s = {1.0};
  const std::vector<Transition> batch{t};
  const std::vector<double> y{100.0};
  const auto lg = q_loss_and_grad(batch, y, net);
  double norm = 0.0;
  for (double g : lg.grads) norm += g * g;
  CHECK(std::sqrt(norm) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(lg.grad_norm == doctest::Approx(200.0 * std::sqrt(2.0)));
  const std::vector<double> inf_y{INFINITY};
  CHECK_THROWS_AS(q_loss_and_grad(batch, inf_y, net), NumericError);
}

TEST_CASE("target network does not receive gradient") {
  Rng rng(41);
  const nn::QNetwork online(testing::random_net(rng, 2, 3));
  nn::QNetwork target(testing::random_net(rng, 2, 3));
  std::vector<Transition> batch;
  for (int i = 0; i < 6; ++i) {
    Transition t = tr(uniform_real(rng, -1, 1), 0.9, uniform_index(rng, 3), 2);
    t.s = testing::random_vector(rng, 2);
    batch.push_back(t);
  }
  const auto y = td_target_vanilla(batch, target);
  const auto before = q_loss_and_grad(batch, y, online);
  auto p = target.params();
  for (double& v : p) v += 0.3;
  target.set_params(p);
  const auto after = q_loss_and_grad(batch, y, online);  // same y, perturbed target
  CHECK(before.grads == after.grads);
  CHECK(before.grads.size() == online.param_count());
}

TEST_CASE("hard and soft target updates") {
  auto target = constant_net({0.5});
  const auto online = constant_net({1.5});
  soft_update(target, online, 0.001);
  CHECK(target.q_values(std::vector<double>{0.0})[0] == doctest::Approx(0.501).epsilon(1e-15));

  Rng rng(47);
  const nn::QNetwork a(testing::random_net(rng, 3, 2));
  nn::QNetwork b = a, hard = a;
  auto pb = b.params();
  for (double& v : pb) v = uniform_real(rng, -1, 1);
  b.set_params(pb);
  nn::QNetwork soft = b;
  hard = b;
  hard_update(hard, a);
  soft_update(soft, a, 1.0);
  CHECK(hard.params() == a.params());
  CHECK(soft.params() == hard.params());

  // Deep copy: mutating the source afterwards leaves the target alone.
  nn::QNetwork src = a;
  hard_update(hard, src);
  auto ps = src.params();
  ps[0] += 1.0;
  src.set_params(ps);
  CHECK(hard.params() == a.params());

  CHECK_THROWS_AS(soft_update(soft, a, 0.0), InputError);
  CHECK_THROWS_AS(soft_update(soft, a, 1.5), InputError);
  const nn::QNetwork other(testing::random_net(rng, 4, 2));
  CHECK_THROWS_AS(hard_update(hard, other), InputError);
}

TEST_CASE("tiny tau barely moves the target") {
  Rng rng(53);
  const nn::QNetwork online(testing::random_net(rng, 2, 2));
  nn::QNetwork target = online;
  auto pt = target.params();
  for (double& v : pt) v = uniform_real(rng, -1, 1);
  target.set_params(pt);
  const auto before = target.params();
  const auto po = online.params();
  soft_update(target, online, 1e-12);
  const auto after = target.params();
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(std::abs(after[i] - before[i]) <= 1e-12 * std::abs(po[i] - before[i]) + 1e-16);
}

TEST_CASE("soft updates contract the gap by (1 - tau)^n") {
  Rng rng(59);
  const nn::QNetwork online(testing::random_net(rng, 3, 3));
  nn::QNetwork target = online;
  auto pt = target.params();
  for (double& v : pt) v = uniform_real(rng, -2, 2);
  target.set_params(pt);
  const auto po = online.params();
  const auto gap0 = pt;
  const double tau = 0.05;
  const int n = 50;
  for (int k = 0; k < n; ++k) soft_update(target, online, tau);
  const auto pn = target.params();
  for (std::size_t i = 0; i < pn.size(); ++i) {
    const double expected = std::pow(1 - tau, n) * std::abs(gap0[i] - po[i]);
    CHECK(std::abs(std::abs(pn[i] - po[i]) - expected) <= 1e-12);
  }
}

TEST_CASE("tabular Q update") {
  QTable q(2, 2);
  tabular_q_update(q, {0, 1, 1.0, 1, false}, 0.5, 0.9);
  CHECK(q.at(0, 1) == 0.5);

  QTable q2(2, 2, 3.0);
  tabular_q_update(q2, {1, 0, 2.0, 0, true}, 1.0, 0.9);
  CHECK(q2.at(1, 0) == 2.0);

  QTable q3(3, 2);
  tabular_q_update(q3, {2, 1, 0.0, 0, false}, 0.7, 0.9);
  for (double v : q3.values()) CHECK(v == 0.0);

  CHECK_THROWS_AS(tabular_q_update(q3, {3, 0, 0.0, 0, false}, 0.5, 0.9), InputError);
  CHECK_THROWS_AS(tabular_q_update(q3, {0, 2, 0.0, 0, false}, 0.5, 0.9), InputError);
  CHECK_THROWS_AS(tabular_q_update(q3, {0, 0, 0.0, 5, false}, 0.5, 0.9), InputError);
  CHECK_THROWS_AS(tabular_q_update(q3, {0, 0, 0.0, 0, false}, 0.0, 0.9), InputError);
}

TEST_CASE("value iteration oracle closed forms") {
  TabularMDP one{1, 1, {1.0}, {1.0}, 0.5};
  CHECK(value_iteration_oracle(one, 1e-12).at(0, 0) == doctest::Approx(2.0).epsilon(1e-11));

  Rng rng(61);
  auto myopic = TabularMDP::random(4, 3, 0.0, rng);
  const auto q0 = value_iteration_oracle(myopic, 1e-12);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t a = 0; a < 3; ++a) CHECK(q0.at(s, a) == myopic.R(s, a));

  auto mdp = TabularMDP::random(5, 2, 0.9, rng);
  CHECK_NOTHROW(mdp.validate());
  const auto qstar = value_iteration_oracle(mdp, 1e-10);
  CHECK(bellman_residual(qstar, mdp) < 1e-9);

  TabularMDP broken = mdp;
  broken.transition[0] += 0.1;
  CHECK_THROWS_AS(broken.validate(), InputError);
  TabularMDP loop{1, 1, {1.0}, {1.0}, 1.0};
  CHECK_THROWS_AS(value_iteration_oracle(loop, 1e-12, 1000), NumericError);
}

TEST_CASE("discounted return") {
  CHECK(discounted_return(std::vector<double>{1, 1, 1}, 0.5) == 1.75);
  CHECK(discounted_return(std::vector<double>{3, 5, 7}, 0.0) == 3.0);
  CHECK(discounted_return(std::vector<double>{}, 0.9) == 0.0);
}

TEST_CASE("Q-learning converges to the value-iteration fixed point") {
  Rng rng(67);
  const auto mdp = TabularMDP::random(5, 2, testing::kTabularGamma, rng);
  const auto qstar = value_iteration_oracle(mdp, 1e-13);

  const auto swept = testing::swept_q_learning(mdp, 1e-13);
  CHECK(swept.sup_distance(qstar) < 1e-6);

  Rng sample_rng(71);
  const auto sampled = testing::sampled_q_learning(mdp, 200'000, sample_rng);
  CHECK(sampled.sup_distance(qstar) < 1e-2);
}

TEST_CASE("agent construction, acting and learning are deterministic") {
  AgentConfig cfg;
  cfg.hidden = {8};
  cfg.stream_hidden = 4;
  cfg.batch_size = 4;
  cfg.learn_start = 8;
  cfg.replay_capacity = 64;
  for (auto variant : {Variant::vanilla, Variant::double_dqn, Variant::duel, Variant::double_duel}) {
    cfg.variant = variant;
    Agent a(cfg, 3, 4, 12345), b(cfg, 3, 4, 12345);
    CHECK(a.online() == b.online());
    CHECK(a.online() == a.target());
    CHECK(a.online().is_dueling() == uses_dueling_head(variant));
    Rng env(1);
    std::vector<double> obs = testing::random_vector(env, 3);
    for (int step = 0; step < 40; ++step) {
      const auto act_a = a.act(obs, 0.5);
      CHECK(act_a == b.act(obs, 0.5));
      const auto next = testing::random_vector(env, 3);
      const double r = uniform01(env);
      a.remember(obs, act_a, r, next, false);
      b.remember(obs, act_a, r, next, false);
      if (a.ready_to_learn()) {
        const auto la = a.learn();
        const auto lb = b.learn();
        REQUIRE(la.has_value());
        CHECK(la->loss == lb->loss);
      }
      obs = next;
    }
    CHECK(a.online() == b.online());
    CHECK(a.target() == b.target());
    CHECK(a.learner_steps() == 33);
    CHECK(a.env_steps() == 40);
  }
}

TEST_CASE("agent guards") {
  AgentConfig cfg;
  cfg.learn_start = 10;
  Agent agent(cfg, 2, 3, 1);
  CHECK_THROWS_AS(agent.learn(), StateError);
  CHECK_THROWS_AS(agent.act(std::vector<double>{1.0}, 0.1), InputError);
  AgentConfig bad = cfg;
  bad.target_update = TargetUpdate::soft(0.0);
  CHECK_THROWS_AS(Agent(bad, 2, 3, 1), ConfigError);
  bad = cfg;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(Agent(bad, 2, 3, 1), ConfigError);
  bad = cfg;
  bad.target_update = TargetUpdate::hard(0);
  CHECK_THROWS_AS(Agent(bad, 2, 3, 1), ConfigError);
  CHECK(variant_from_string("double_duel") == Variant::double_duel);
  CHECK_THROWS_AS(variant_from_string("rainbow"), ConfigError);
}

TEST_CASE("time-limit ends bootstrap unless configured as terminal") {
  AgentConfig cfg;
  cfg.gamma = 0.9;
  Agent agent(cfg, 1, 2, 3);
  const std::vector<double> o{0.0};
  agent.remember(o, 0, 1.0, o, false, true);
  agent.remember(o, 1, 1.0, o, true, false);
  cfg.time_limit_terminal = true;
  Agent cut(cfg, 1, 2, 3);
  cut.remember(o, 0, 1.0, o, false, true);
  const auto c = agent.replay().contents();
  CHECK(c[0].gamma_next == 0.9);
  CHECK_FALSE(c[0].done);
  CHECK(c[1].done);
  CHECK(cut.replay().contents()[0].done);
}
