#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "jetrl/bridge/remote_env.hpp"
#include "jetrl/bridge/server.hpp"
#include "jetrl/errors.hpp"
#include "jetrl/harness/checkpoint.hpp"
#include "jetrl/harness/config.hpp"
#include "jetrl/harness/csv.hpp"
#include "jetrl/harness/experiment.hpp"
#include "jetrl/thermal/thermal_env.hpp"

using namespace jetrl;
using namespace jetrl::harness;
namespace fs = std::filesystem;

namespace {

constexpr double kFlux = 139.64305162503348;

/// Scratch directory removed when the test case ends.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("jetrl_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

/// 20-decision episodes on a coarse grid with a tiny network.
RunConfig small_config(const fs::path& out) {
  RunConfig cfg;
  cfg.name = "unit";
  cfg.n_episodes = 3;
  cfg.eval_duration = 2.0;
  cfg.output_dir = out.string();
  cfg.env.episode_duration = 2.0;
  cfg.env.nx = 24;
  cfg.env.ny = 12;
  cfg.env.props.q_flux = kFlux;
  cfg.agent.hidden = {8};
  cfg.agent.stream_hidden = 4;
  cfg.agent.batch_size = 8;
  cfg.agent.learn_start = 16;
  cfg.agent.replay_capacity = 500;
  return cfg;
}

/// Wraps an environment and throws StepError once, at decision `fail_at`.
class FlakyEnv : public bridge::Environment {
 public:
  FlakyEnv(bridge::Environment& inner, std::size_t fail_at) : inner_(inner), fail_at_(fail_at) {}
  bridge::EnvSpec spec() const override { return inner_.spec(); }
  std::vector<double> reset() override { return inner_.reset(); }
  bridge::StepResult step(std::size_t a) override {
    if (calls_++ == fail_at_) throw StepError("lost the solver");
    return inner_.step(a);
  }

 private:
  bridge::Environment& inner_;
  std::size_t fail_at_;
  std::size_t calls_ = 0;
};

}  // namespace

TEST_CASE("config round-trips through INI text") {
  const RunConfig def;
  CHECK(parse_config(to_ini(def)) == def);
  CHECK(parse_config("") == def);

  RunConfig c;
  c.name = "layout_10mm";
  c.seed = 12345678901234ULL;
  c.n_episodes = 7;
  c.env.probes.offset = 0.01;
  c.env.props.q_flux = 123.456789012345;
  c.env.jet_shape.layer_thickness = 0.3;
  c.agent.variant = rl::Variant::duel;
  c.agent.target_update = rl::TargetUpdate::hard(250);
  c.agent.hidden = {32, 16, 8};
  c.agent.adam.lr = 3e-4;
  c.temp_scale = 1.5;
  c.sweep.seeds = {4, 5};
  c.sweep.layouts = {0.002};
  c.sweep.variants = {"duel", "double-hard"};
  const auto text = to_ini(c);
  CHECK(parse_config(text) == c);
  CHECK(to_ini(parse_config(text)) == text);
}

TEST_CASE("config parsing rejects unknown and malformed input") {
  CHECK_THROWS_AS(parse_config("[run]\nseeed = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[runs]\nseed = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nseed = three\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nseed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nformat_version = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\ndt = 0.01x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[agent]\nvariant = rainbow\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[agent]\ntau = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\nheat_flux = lots\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);

  const auto c = parse_config("[run]\nseed = 9\n[env]\nheat_flux = auto\nprobe_offset = 0.005\n");
  CHECK(c.seed == 9);
  CHECK(c.env.props.q_flux == 0.0);
  CHECK(c.env.probes.offset == 0.005);
}

TEST_CASE("output root honours the environment override") {
  RunConfig c;
  c.output_dir = "results";
  ::unsetenv(kOutputRootEnv);
  CHECK(output_root(c) == fs::path("results"));
  ::setenv(kOutputRootEnv, "/tmp/elsewhere", 1);
  CHECK(output_root(c) == fs::path("/tmp/elsewhere"));
  ::setenv(kOutputRootEnv, "", 1);
  CHECK(output_root(c) == fs::path("results"));
  ::unsetenv(kOutputRootEnv);
}

TEST_CASE("prepared agent config and variant labels") {
  RunConfig c;
  const auto a = prepared_agent_config(c);
  CHECK(a.epsilon.decay_steps == 30'000);
  REQUIRE(a.obs_center.size() == 11);
  CHECK(a.obs_center[0] == 1.0);
  CHECK(a.obs_scale[0] == doctest::Approx(2.0 / 303.0));
  CHECK(a.obs_center[5] == 0.0);
  CHECK(a.obs_center[10] == 4.5);
  CHECK(a.obs_scale[10] == 4.5);

  apply_variant_label(c, "vanilla");
  CHECK(c.agent.variant == rl::Variant::vanilla);
  CHECK(c.agent.target_update.kind == rl::TargetUpdate::Kind::hard);
  apply_variant_label(c, "double-soft");
  CHECK(c.agent.variant == rl::Variant::double_dqn);
  CHECK(c.agent.target_update.kind == rl::TargetUpdate::Kind::soft);
  CHECK(variant_label(c.agent) == "double-soft");
  apply_variant_label(c, "double-hard");
  CHECK(variant_label(c.agent) == "double-hard");
  apply_variant_label(c, "duel");
  CHECK(c.agent.variant == rl::Variant::duel);
  CHECK(variant_label(c.agent) == "duel");
  CHECK_THROWS_AS(apply_variant_label(c, "triple"), ConfigError);
}

TEST_CASE("csv formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(CsvRow().add(1).add("x").blank().add(true).str() == "1,x,,1");
  TempDir tmp;
  CsvWriter w(tmp.path / "a.csv", {"a", "b"});
  CHECK_THROWS_AS(w.write(CsvRow().add(1)), FormatError);
  std::ofstream(tmp.path / "plain") << "x";
  CHECK_THROWS_AS(CsvWriter(tmp.path / "plain" / "a.csv", {"a"}), FormatError);
}

TEST_CASE("zero episodes: empty metrics and an untrained checkpoint") {
  TempDir tmp;
  auto cfg = small_config(tmp.path);
  cfg.n_episodes = 0;
  TrainOptions opts;
  opts.run_dir = tmp.path / "run";
  const auto r = train(cfg, opts);
  CHECK(r.metrics.empty());
  CHECK_FALSE(r.run_aborted);
  CHECK(line_count(opts.run_dir / "metrics.csv") == 1);
  const rl::Agent fresh(prepared_agent_config(cfg), 11, 10, cfg.seed);
  CHECK(r.checkpoint == capture(fresh, cfg.seed));
  CHECK(load_checkpoint(opts.run_dir / "checkpoint.json") == r.checkpoint);
  CHECK(parse_config(slurp(opts.run_dir / "config.ini")) == cfg);
}

TEST_CASE("training metrics are consistent and deterministic") {
  TempDir tmp;
  const auto cfg = small_config(tmp.path);
  TrainOptions a, b;
  a.run_dir = tmp.path / "a";
  b.run_dir = tmp.path / "b";
  std::size_t callbacks = 0;
  a.on_episode = [&](const MetricsRow&) { ++callbacks; };
  const auto ra = train(cfg, a);
  const auto rb = train(cfg, b);
  CHECK(callbacks == 3);
  REQUIRE(ra.metrics.size() == 3);
  for (const auto& m : ra.metrics) {
    CHECK(m.decisions == 20);
    CHECK_FALSE(m.aborted);
    CHECK(m.normalized_reward == doctest::Approx(100.0 * m.total_reward / 20.0).epsilon(1e-15));
    CHECK(m.normalized_reward <= 100.0);
    CHECK(m.in_band_fraction >= 0.0);
    CHECK(m.in_band_fraction <= 1.0);
    CHECK((m.in_band_fraction == 1.0) == (m.normalized_reward == 100.0));
    CHECK(m.min_t_surf <= m.mean_t_surf);
    CHECK(m.mean_t_surf <= m.max_t_surf);
  }
  // Decay spans 30% of the 60 planned decisions.
  CHECK(prepared_agent_config(cfg).epsilon.decay_steps == 18);
  CHECK(ra.metrics.back().epsilon == doctest::Approx(0.05));
  CHECK(slurp(a.run_dir / "metrics.csv") == slurp(b.run_dir / "metrics.csv"));
  CHECK(slurp(a.run_dir / "checkpoint.json") == slurp(b.run_dir / "checkpoint.json"));
  CHECK(line_count(a.run_dir / "metrics.csv") == 4);
  CHECK(line_count(a.run_dir / "timing.csv") == 4);
  CHECK(slurp(a.run_dir / "metrics.csv").rfind("episode,total_reward,normalized_reward,", 0) == 0);

  // The default run directory sits under the output root.
  const auto rc = train(cfg);
  CHECK(rc.run_dir == tmp.path / "unit" / "seed_1");
  CHECK(slurp(rc.run_dir / "metrics.csv") == slurp(a.run_dir / "metrics.csv"));

  auto other = cfg;
  other.seed = 2;
  TrainOptions c;
  c.write_files = false;
  CHECK(train(other, c).checkpoint.online != ra.checkpoint.online);
}

TEST_CASE("a lost environment step aborts only that episode") {
  TempDir tmp;
  const auto cfg = small_config(tmp.path);
  thermal::ThermalEnv inner(resolved_env(cfg));
  FlakyEnv flaky(inner, 25);  // the sixth decision of episode two
  TrainOptions opts;
  opts.env = &flaky;
  opts.write_files = false;
  const auto r = train(cfg, opts);
  REQUIRE(r.metrics.size() == 3);
  CHECK_FALSE(r.metrics[0].aborted);
  CHECK(r.metrics[1].aborted);
  CHECK(r.metrics[1].decisions == 5);
  CHECK_FALSE(r.metrics[2].aborted);
  CHECK(r.metrics[2].decisions == 20);
  CHECK_FALSE(r.run_aborted);
}

TEST_CASE("training through a loopback remote matches local training") {
  TempDir tmp;
  const auto cfg = small_config(tmp.path);
  thermal::ThermalEnv served(resolved_env(cfg));
  bridge::TcpListener listener("127.0.0.1:0");
  bridge::EnvServer server(served, {1, bridge::Millis(20)});
  std::thread th([&] { server.serve(listener); });
  {
    auto remote = bridge::RemoteEnv::connect("127.0.0.1:" + std::to_string(listener.port()));
    TrainOptions ro, lo;
    ro.env = &remote;
    ro.write_files = lo.write_files = false;
    const auto rr = train(cfg, ro);
    const auto lr = train(cfg, lo);
    REQUIRE(rr.metrics.size() == lr.metrics.size());
    for (std::size_t i = 0; i < rr.metrics.size(); ++i) {
      CHECK(rr.metrics[i].total_reward == lr.metrics[i].total_reward);
      CHECK(std::isnan(rr.metrics[i].mean_t_surf));
    }
    CHECK(rr.checkpoint == lr.checkpoint);
  }
  th.join();
}

TEST_CASE("checkpoint JSON round-trip and failure modes") {
  TempDir tmp;
  auto cfg = small_config(tmp.path);
  for (const char* label : {"double-soft", "duel"}) {
    apply_variant_label(cfg, label);
    TrainOptions o;
    o.write_files = false;
    const auto r = train(cfg, o);
    const auto text = to_json(r.checkpoint);
    CHECK(from_json(text) == r.checkpoint);
    CHECK(to_json(from_json(text)) == text);

    const fs::path p1 = tmp.path / "c1.json", p2 = tmp.path / "c2.json";
    save_checkpoint(r.checkpoint, p1);
    save_checkpoint(load_checkpoint(p1), p2);
    CHECK(slurp(p1) == slurp(p2));

    std::ofstream(tmp.path / "trunc.json") << text.substr(0, text.size() / 2);
    CHECK_THROWS_AS(load_checkpoint(tmp.path / "trunc.json"), FormatError);
    CHECK_THROWS_AS(load_checkpoint(tmp.path / "missing.json"), FormatError);
    auto bumped = text;
    const auto pos = bumped.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    bumped.replace(pos, 19, "\"format_version\": 2");
    CHECK_THROWS_AS(from_json(bumped), FormatError);

    auto broken = r.checkpoint;
    broken.online.pop_back();
    CHECK_THROWS_AS(restore(broken), FormatError);
  }
}

TEST_CASE("restored agents act exactly like the originals") {
  TempDir tmp;
  auto cfg = small_config(tmp.path);
  cfg.env.episode_duration = 12.0;
  for (const char* label : {"vanilla", "duel"}) {
    apply_variant_label(cfg, label);
    rl::Agent original(prepared_agent_config(cfg), 11, 10, 99);
    thermal::ThermalEnv env(resolved_env(cfg));
    auto obs = env.reset();
    for (int k = 0; k < 20; ++k) {
      const auto a = original.act(obs, 0.5);
      auto s = env.step(a);
      original.remember(obs, a, s.reward, s.obs, false);
      if (original.ready_to_learn()) original.learn();
      obs = s.obs;
    }
    rl::Agent copy = restore(from_json(to_json(capture(original, 99))));
    CHECK(copy.online() == original.online());
    CHECK(copy.target() == original.target());
    CHECK(copy.learner_steps() == original.learner_steps());
    CHECK(copy.replay().size() == 0);

    // 100 decisions of epsilon-greedy play: identical draws, identical actions.
    auto e1 = thermal::ThermalEnv(resolved_env(cfg));
    auto e2 = thermal::ThermalEnv(resolved_env(cfg));
    auto o1 = e1.reset();
    auto o2 = e2.reset();
    for (int k = 0; k < 100; ++k) {
      const auto a1 = original.act(o1, 0.2);
      const auto a2 = copy.act(o2, 0.2);
      REQUIRE(a1 == a2);
      o1 = e1.step(a1).obs;
      o2 = e2.step(a2).obs;
      CHECK(o1 == o2);
    }
  }
}

TEST_CASE("greedy evaluation") {
  TempDir tmp;
  auto cfg = small_config(tmp.path);
  TrainOptions o;
  o.write_files = false;
  const auto r = train(cfg, o);
  const auto before = to_json(r.checkpoint);

  const auto ev = evaluate(r.checkpoint, cfg, tmp.path / "eval");
  CHECK(to_json(r.checkpoint) == before);
  REQUIRE(ev.history.size() == 20);
  for (const auto& h : ev.history) {
    CHECK(h.t_star == h.t_surf / 303.0);
    CHECK(h.velocity == cfg.env.action_velocity(h.action));
  }
  CHECK(ev.history.back().time == doctest::Approx(2.0));
  CHECK(ev.summary.in_band_fraction >= 0.0);
  CHECK(ev.summary.in_band_fraction <= 1.0);
  CHECK(line_count(tmp.path / "eval" / "history.csv") == 21);
  CHECK(line_count(tmp.path / "eval" / "summary.csv") == 2);
  CHECK(line_count(tmp.path / "eval" / "mean_field.csv") == 2 + 12);

  // Same checkpoint, same rollout.
  const auto again = evaluate(r.checkpoint, cfg);
  CHECK(again.summary.total_reward == ev.summary.total_reward);

  // An untrained network still produces a report.
  const rl::Agent fresh(prepared_agent_config(cfg), 11, 10, 5);
  CHECK_NOTHROW(evaluate(capture(fresh, 5), cfg));

  auto mismatched = r.checkpoint;
  mismatched.obs_dim = 7;
  CHECK_THROWS_AS(evaluate(mismatched, cfg), ConfigError);
  auto longer = cfg;
  longer.eval_duration = 4.0;
  CHECK(evaluate(r.checkpoint, longer).history.size() == 40);
}

TEST_CASE("constant-velocity baselines") {
  TempDir tmp;
  auto cfg = small_config(tmp.path);
  cfg.env.nx = 96;
  cfg.env.ny = 48;
  cfg.eval_duration = 100.0;
  const auto slow = run_baseline(0, cfg, tmp.path / "b0");
  const auto fast = run_baseline(9, cfg);
  for (const auto& h : slow.history) CHECK(h.action == 0);
  CHECK(slow.summary.final_t_surf / 303.0 > 1.0);
  CHECK(fast.summary.final_t_surf / 303.0 < 1.0);
  CHECK(fs::exists(tmp.path / "b0" / "history.csv"));
  CHECK_THROWS_AS(run_baseline(10, cfg), InputError);
}

TEST_CASE("sweeps write long-format and summary tables") {
  TempDir tmp;
  auto cfg = small_config(tmp.path);
  cfg.sweep.seeds = {1, 2};
  cfg.sweep.episodes = {1, 2};
  CHECK(sweep_values(cfg, SweepAxis::episodes) == std::vector<std::string>{"1", "2"});
  CHECK(sweep_cell_config(cfg, SweepAxis::episodes, "2", 7).n_episodes == 2);
  CHECK(sweep_cell_config(cfg, SweepAxis::layout, "0.005", 7).env.probes.offset == 0.005);
  CHECK(sweep_cell_config(cfg, SweepAxis::variant, "duel", 7).agent.variant == rl::Variant::duel);
  CHECK(sweep_cell_config(cfg, SweepAxis::variant, "duel", 7).seed == 7);
  CHECK(sweep_axis_from_string("layout") == SweepAxis::layout);
  CHECK_THROWS_AS(sweep_axis_from_string("height"), ConfigError);

  std::size_t seen = 0;
  const auto cells = sweep(cfg, SweepAxis::episodes, true, [&](const SweepCell&) { ++seen; });
  CHECK(cells.size() == 4);
  CHECK(seen == 4);
  const fs::path dir = tmp.path / "unit" / "sweep_episodes";
  CHECK(line_count(dir / "sweep_episodes.csv") == 1 + 2 * (1 + 2));
  CHECK(line_count(dir / "sweep_episodes_summary.csv") == 1 + 4);
  CHECK(slurp(dir / "sweep_episodes.csv").rfind("axis,value,seed,episode,", 0) == 0);
}
