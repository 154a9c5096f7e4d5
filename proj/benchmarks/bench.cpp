#include <benchmark/benchmark.h>

#include <vector>

#include "jetrl/harness/config.hpp"
#include "jetrl/nn/q_network.hpp"
#include "jetrl/random.hpp"
#include "jetrl/rl/agent.hpp"
#include "jetrl/thermal/jet_flow.hpp"
#include "jetrl/thermal/solver.hpp"
#include "jetrl/thermal/thermal_env.hpp"

using namespace jetrl;

namespace {

// Flux the default configuration calibrates to.
constexpr double kFlux = 139.64305162503348;

thermal::EnvConfig env_config() {
  thermal::EnvConfig cfg;
  cfg.props.q_flux = kFlux;
  return cfg;
}

std::vector<double> random_obs(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (double& v : x) v = uniform_real(rng, -1, 1);
  return x;
}

nn::QNetwork make_net(bool dueling) {
  const std::vector<std::size_t> hidden = {64, 64};
  return dueling ? nn::QNetwork::dueling(11, hidden, 32, 10, 1) : nn::QNetwork::plain(11, hidden, 10, 1);
}

}  // namespace

// One solver sub-step on the default grid at full jet speed.
static void BM_SolverStep(benchmark::State& state) {
  const auto cfg = env_config();
  thermal::JetFlowModel jet(cfg.props);
  thermal::ThermalGrid g(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)) / 2,
                         cfg.props.half_width(), cfg.props.H(), cfg.props.T_inf);
  thermal::AdvectionDiffusionSolver solver(g, jet, cfg.props);
  const double dt = 0.9 * solver.stability_limit(1.0);
  for (auto _ : state) {
    solver.step(g, 1.0, dt);
    benchmark::DoNotOptimize(g.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.values().size()));
}
BENCHMARK(BM_SolverStep)->Arg(48)->Arg(96)->Arg(192);

// One 0.1 s control decision of the environment.
static void BM_EnvDecision(benchmark::State& state) {
  thermal::ThermalEnv env(env_config());
  env.reset();
  Rng rng(7);
  for (auto _ : state) {
    auto r = env.step(uniform_index(rng, 10));
    if (r.done) env.reset();
    benchmark::DoNotOptimize(r.reward);
  }
}
BENCHMARK(BM_EnvDecision);

static void BM_QForward(benchmark::State& state) {
  const auto net = make_net(state.range(0) != 0);
  Rng rng(3);
  const auto x = random_obs(rng, 11);
  for (auto _ : state) benchmark::DoNotOptimize(net.q_values(x));
}
BENCHMARK(BM_QForward)->ArgName("dueling")->Arg(0)->Arg(1);

static void BM_QForwardBackward(benchmark::State& state) {
  const auto net = make_net(state.range(0) != 0);
  Rng rng(3);
  const auto x = random_obs(rng, 11);
  const auto dq = random_obs(rng, 10);
  std::vector<double> grad(net.param_count(), 0.0);
  nn::QTape tape;
  for (auto _ : state) {
    net.forward(x, tape);
    net.backward_accumulate(tape, dq, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_QForwardBackward)->ArgName("dueling")->Arg(0)->Arg(1);

// One mini-batch update (64 transitions) with the default agent settings.
static void BM_AgentLearn(benchmark::State& state) {
  harness::RunConfig cfg;
  harness::apply_variant_label(cfg, state.range(0) != 0 ? "duel" : "double-soft");
  rl::Agent agent(harness::prepared_agent_config(cfg), 11, 10, 1);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_obs(rng, 11), s2 = random_obs(rng, 11);
    agent.remember(s, uniform_index(rng, 10), uniform01(rng), s2, false);
  }
  for (auto _ : state) benchmark::DoNotOptimize(agent.learn());
}
BENCHMARK(BM_AgentLearn)->ArgName("dueling")->Arg(0)->Arg(1);

BENCHMARK_MAIN();
