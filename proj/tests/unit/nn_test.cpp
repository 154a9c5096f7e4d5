#include <cmath>
#include <numeric>

#include "doctest.h"
#include "jetrl/errors.hpp"
#include "jetrl/nn/adam.hpp"
#include "jetrl/nn/dense_net.hpp"
#include "jetrl/nn/dueling_head.hpp"
#include "jetrl/nn/gradient_check.hpp"
#include "jetrl/nn/q_network.hpp"
#include "oracles.hpp"

using namespace jetrl;
using namespace jetrl::nn;
using jetrl::testing::random_vector;

namespace {

std::vector<LayerSpec> two_layer() {
  return {{4, 8, Activation::relu}, {8, 2, Activation::identity}};
}

}  // namespace

TEST_CASE("init: parameter count and determinism") {
  DenseNet a(two_layer(), 7);
  CHECK(a.param_count() == 4 * 8 + 8 + 8 * 2 + 2);
  CHECK(a.param_count() == 58);
  DenseNet b(two_layer(), 7);
  CHECK(a == b);
  DenseNet c(two_layer(), 8);
  CHECK_FALSE(a == c);
}

TEST_CASE("init: weights within +-1/sqrt(in), biases zero") {
  DenseNet net(two_layer(), 3);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& l = net.layers()[k];
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in_dim));
    for (std::size_t i = 0; i < l.in_dim * l.out_dim; ++i)
      CHECK(std::abs(net.params()[net.weight_offset(k) + i]) <= bound);
    for (std::size_t i = 0; i < l.out_dim; ++i) CHECK(net.params()[net.bias_offset(k) + i] == 0.0);
  }
}

TEST_CASE("init: mismatched or empty layers are configuration errors") {
  CHECK_THROWS_AS(DenseNet({{4, 8, Activation::relu}, {9, 2, Activation::identity}}, 1),
                  ConfigError);
  CHECK_THROWS_AS(DenseNet({}, 1), ConfigError);
  CHECK_THROWS_AS(DenseNet({{0, 2, Activation::identity}}, 1), ConfigError);
}

TEST_CASE("forward: zero network gives zeros") {
  DenseNet net(two_layer(), 1);
  std::vector<double> zeros(net.param_count(), 0.0);
  net.set_params(zeros);
  for (double v : net.forward(std::vector<double>{1, -2, 3, 4})) CHECK(v == 0.0);
}

TEST_CASE("forward: identity layer") {
  DenseNet net({{2, 2, Activation::identity}}, 1);
  net.set_params(std::vector<double>{1, 0, 0, 1, 0, 0});
  const auto y = net.forward(std::vector<double>{1, 2});
  CHECK(y == std::vector<double>{1, 2});
}

TEST_CASE("forward: matches hand-rolled matmul oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t in = 1 + uniform_index(rng, 6);
    const std::size_t out = 1 + uniform_index(rng, 5);
    const DenseNet net = testing::random_net(rng, in, out);
    const auto x = random_vector(rng, in, -2, 2);
    const auto y = net.forward(x);
    const auto ref = testing::reference_forward(net, x);
    REQUIRE(y.size() == ref.y.size());
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(ref.y[i]).epsilon(1e-12));
  }
}

TEST_CASE("forward: pure and rejects bad input") {
  DenseNet net(two_layer(), 5);
  const std::vector<double> x = {0.1, 0.2, -0.3, 0.4};
  const auto before = std::vector<double>(net.params().begin(), net.params().end());
  CHECK(net.forward(x) == net.forward(x));
  CHECK(std::equal(before.begin(), before.end(), net.params().begin()));
  CHECK_THROWS_AS(net.forward(std::vector<double>{1, 2}), InputError);
  CHECK_THROWS_AS(net.forward(std::vector<double>{1, 2, NAN, 4}), InputError);
}

TEST_CASE("backward: zero upstream gives zero gradient") {
  DenseNet net(two_layer(), 2);
  const auto g = net.backward(std::vector<double>{1, 2, 3, 4}, std::vector<double>{0, 0});
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("backward: single linear layer, L = y0") {
  DenseNet net({{3, 2, Activation::identity}}, 9);
  const std::vector<double> x = {0.5, -1.5, 2.0};
  const auto g = net.backward(x, std::vector<double>{1, 0});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(g[j] == x[j]);      // row 0
    CHECK(g[3 + j] == 0.0);   // row 1
  }
  CHECK(g[6] == 1.0);
  CHECK(g[7] == 0.0);
}

TEST_CASE("backward: input gradient of a linear layer is W^T dL/dy") {
  DenseNet net({{2, 2, Activation::identity}}, 1);
  net.set_params(std::vector<double>{1, 2, 3, 4, 0, 0});
  Tape tape;
  net.forward(std::vector<double>{1, 1}, tape);
  std::vector<double> grad(net.param_count(), 0.0), dx;
  net.backward_accumulate(tape, std::vector<double>{1, 10}, grad, &dx);
  CHECK(dx == std::vector<double>{31, 42});
}

TEST_CASE("finite differences: linear scalar net") {
  DenseNet net({{3, 1, Activation::identity}}, 4);
  const std::vector<double> x = {0.3, -0.7, 1.1};
  const auto fd = finite_difference_gradient(net, x, std::vector<double>{1.0}, 1e-5);
  for (std::size_t j = 0; j < 3; ++j) CHECK(fd[j] == doctest::Approx(x[j]).epsilon(1e-9));
  CHECK(fd[3] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(finite_difference_gradient(net, x, std::vector<double>{1.0}, 0.0), InputError);
  CHECK_THROWS_AS(finite_difference_gradient(net, x, std::vector<double>{1.0}, -1e-5),
                  InputError);
}

TEST_CASE("backward: matches finite differences on random nets") {
  Rng rng(2024);
  int checked = 0;
  while (checked < 150) {
    const std::size_t in = 1 + uniform_index(rng, 5);
    const std::size_t out = 1 + uniform_index(rng, 4);
    const DenseNet net = testing::random_net(rng, in, out);
    const auto x = random_vector(rng, in);
    if (testing::reference_forward(net, x).relu_margin < testing::kKinkMargin) continue;
    const auto dy = random_vector(rng, out);
    const auto g = net.backward(x, dy);
    const auto fd = finite_difference_gradient(net, x, dy, 1e-5);
    CHECK(max_relative_error(g, fd) < 1e-4);
    ++checked;
  }
}

TEST_CASE("dueling: aggregation by hand") {
  // Trunk: identity 1 -> 1. Value stream outputs 2, advantage stream [1, 3].
  DenseNet trunk({{1, 1, Activation::relu}}, 1);
  trunk.set_params(std::vector<double>{1, 0});
  DenseNet value({{1, 1, Activation::identity}}, 1);
  value.set_params(std::vector<double>{0, 2});
  DenseNet adv({{1, 2, Activation::identity}}, 1);
  adv.set_params(std::vector<double>{0, 0, 1, 3});
  DuelingHead head(trunk, value, adv);
  const auto q = dueling_forward(head, std::vector<double>{0.5});
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 3.0);

  adv.set_params(std::vector<double>{0, 0, 4, 4});
  const auto qc = dueling_forward(DuelingHead(trunk, value, adv), std::vector<double>{0.5});
  CHECK(qc[0] == 2.0);
  CHECK(qc[1] == 2.0);
}

TEST_CASE("dueling: constant advantage shift leaves Q unchanged") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    auto head = testing::random_dueling(rng, 3, n);
    const auto x = random_vector(rng, 3);
    const auto q0 = dueling_forward(head, x);
    const double k = uniform_real(rng, -10, 10);
    auto p = head.advantage_stream.mutable_params();
    const std::size_t last = head.advantage_stream.layers().size() - 1;
    for (std::size_t a = 0; a < n; ++a) p[head.advantage_stream.bias_offset(last) + a] += k;
    const auto q1 = dueling_forward(head, x);
    for (std::size_t a = 0; a < n; ++a) CHECK(std::abs(q1[a] - q0[a]) < 1e-12);
  }
}

TEST_CASE("dueling: forward matches oracle, backward matches finite differences") {
  Rng rng(77);
  int checked = 0;
  while (checked < 60) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const auto head = testing::random_dueling(rng, 4, n);
    const auto x = random_vector(rng, 4);
    const auto ref = testing::reference_dueling(head, x);
    const auto q = dueling_forward(head, x);
    for (std::size_t a = 0; a < n; ++a) CHECK(q[a] == doctest::Approx(ref.y[a]).epsilon(1e-12));
    if (ref.relu_margin < testing::kKinkMargin) continue;

    const auto dq = random_vector(rng, n);
    DuelingTape tape;
    dueling_forward(head, x, tape);
    std::vector<double> g(head.param_count(), 0.0);
    dueling_backward_accumulate(head, tape, dq, g);
    const auto fd = finite_difference_gradient(head, x, dq, 1e-5);
    CHECK(max_relative_error(g, fd) < 1e-4);
    ++checked;
  }
}

TEST_CASE("q network: flat parameters round-trip for both forms") {
  const std::vector<std::size_t> hidden = {6, 5};
  for (QNetwork net : {QNetwork::plain(3, hidden, 4, 1), QNetwork::dueling(3, hidden, 4, 4, 1)}) {
    auto p = net.params();
    CHECK(p.size() == net.param_count());
    for (double& v : p) v *= 0.5;
    QNetwork other = net;
    other.set_params(p);
    CHECK(other.params() == p);
    CHECK(other.same_shape(net));
    CHECK_THROWS_AS(other.set_params(std::vector<double>(p.size() + 1, 0.0)), InputError);
  }
  CHECK_FALSE(QNetwork::plain(3, hidden, 4, 1).same_shape(QNetwork::dueling(3, hidden, 4, 4, 1)));
}

TEST_CASE("adam: first step by hand") {
  std::vector<double> p = {0.0};
  AdamState st(1, AdamConfig{});
  adam_step(p, std::vector<double>{1.0}, st);
  // m_hat = v_hat = 1, so the step is lr * 1 / (1 + 1e-8).
  CHECK(st.t == 1);
  CHECK(p[0] == doctest::Approx(-0.001).epsilon(1e-7));
  CHECK(p[0] == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam: zero gradients leave params unchanged for any state") {
  Rng rng(3);
  std::vector<double> p = random_vector(rng, 10);
  AdamState st(10, AdamConfig{});
  for (int i = 0; i < 5; ++i) adam_step(p, random_vector(rng, 10), st);
  const auto before = p;
  for (int i = 0; i < 20; ++i) adam_step(p, std::vector<double>(10, 0.0), st);
  CHECK(p == before);
  CHECK(st.t == 25);
}

TEST_CASE("adam: deterministic and rejects non-finite gradients untouched") {
  std::vector<double> p1 = {0.3, -0.2}, p2 = p1;
  AdamState s1(2, AdamConfig{}), s2(2, AdamConfig{});
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> g = {std::sin(i * 0.3), std::cos(i * 0.7)};
    adam_step(p1, g, s1);
    adam_step(p2, g, s2);
  }
  CHECK(p1 == p2);
  CHECK(s1 == s2);
  const auto snapshot = p1;
  const auto state = s1;
  CHECK_THROWS_AS(adam_step(p1, std::vector<double>{NAN, 0.0}, s1), NumericError);
  CHECK(p1 == snapshot);
  CHECK(s1 == state);
}

TEST_CASE("clip_global_norm") {
  std::vector<double> g = {3, 4};
  CHECK(clip_global_norm(g, 10) == 5.0);
  CHECK(g == std::vector<double>{3, 4});
  CHECK(clip_global_norm(g, 1) == 5.0);
  CHECK(std::hypot(g[0], g[1]) == doctest::Approx(1.0).epsilon(1e-15));
}
