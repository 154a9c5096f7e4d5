#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jetrl/bridge/environment.hpp"
#include "jetrl/harness/checkpoint.hpp"
#include "jetrl/harness/config.hpp"
#include "jetrl/thermal/grid.hpp"

namespace jetrl::harness {

/// One training episode. T_surf columns are NaN when the environment does
/// not expose the plate temperature (e.g. a remote environment).
struct MetricsRow {
  std::size_t episode = 0;
  double total_reward = 0.0;       // raw sum over decisions
  double normalized_reward = 0.0;  // 100 * total / decisions per episode
  double mean_t_surf = 0.0;
  double min_t_surf = 0.0;
  double max_t_surf = 0.0;
  double mean_abs_dv = 0.0;        // m/s per decision
  double in_band_fraction = 0.0;
  double epsilon = 0.0;            // at episode end
  std::size_t decisions = 0;
  bool aborted = false;
  std::uint64_t skipped_updates = 0;
  double wall_clock = 0.0;         // s; written to the timing sidecar only
};

/// metrics.csv header (deterministic columns only).
const std::vector<std::string>& metrics_header();

struct TrainOptions {
  /// Environment to train against; when null a local thermal environment is
  /// built from cfg.env (with the heat flux calibrated if unset).
  bridge::Environment* env = nullptr;
  /// Write metrics.csv, timing.csv, config.ini and checkpoint.json under
  /// `run_dir` (or output_root(cfg)/name/seed_<seed> when empty).
  bool write_files = true;
  std::filesystem::path run_dir;
  std::function<void(const MetricsRow&)> on_episode;
};

struct TrainResult {
  std::vector<MetricsRow> metrics;
  Checkpoint checkpoint;
  /// Set when a non-finite loss streak or a lost environment ended the run
  /// early.
  bool run_aborted = false;
  std::string abort_reason;
  std::filesystem::path run_dir;
};

/// Consecutive non-finite updates tolerated before the run is aborted.
inline constexpr std::size_t kMaxNonFiniteStreak = 100;

TrainResult train(const RunConfig& cfg, const TrainOptions& opts = {});

/// Per-decision row of evaluate() and run_baseline().
struct HistoryRow {
  double time = 0.0;            // s, end of the decision period
  std::size_t action = 0;
  double velocity = 0.0;        // m/s
  double t_surf = 0.0;          // K
  double t_star = 0.0;          // T_surf / T_d
  double reward = 0.0;
};

struct RolloutSummary {
  std::size_t decisions = 0;
  double total_reward = 0.0;
  double normalized_reward = 0.0;
  double in_band_fraction = 0.0;
  double mean_t_surf = 0.0;
  double final_t_surf = 0.0;
  double mean_t_star = 0.0;
};

struct RolloutResult {
  std::vector<HistoryRow> history;
  RolloutSummary summary;
  thermal::ThermalGrid mean_field;  // time average over decision instants
};

const std::vector<std::string>& history_header();

/// The thermal environment a run uses: cfg.env with the heat flux
/// calibrated when it is not set explicitly.
thermal::EnvConfig resolved_env(const RunConfig& cfg);

/// Greedy (epsilon = 0) rollout of the checkpointed policy for
/// cfg.eval_duration seconds. Throws ConfigError when the checkpoint does
/// not fit the environment. Writes history.csv, summary.csv and
/// mean_field.csv into `out_dir` when given.
RolloutResult evaluate(const Checkpoint& ckpt, const RunConfig& cfg,
                       const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Same rollout and outputs with the jet held at velocity level `level`.
/// Throws InputError for a level outside the action range.
RolloutResult run_baseline(std::size_t level, const RunConfig& cfg,
                           const std::optional<std::filesystem::path>& out_dir = std::nullopt);

enum class SweepAxis { layout, episodes, variant };
SweepAxis sweep_axis_from_string(const std::string& name);
const char* to_string(SweepAxis axis) noexcept;

struct SweepCell {
  std::string axis_value;
  std::uint64_t seed = 0;
  TrainResult train;
  RolloutSummary eval;
};

/// Train + evaluate for every (axis value, seed) pair from cfg.sweep.
/// Writes sweep_<axis>.csv (long format keyed by axis value, seed,
/// episode) and sweep_<axis>_summary.csv under the output root.
std::vector<SweepCell> sweep(const RunConfig& cfg, SweepAxis axis, bool write_files = true,
                             const std::function<void(const SweepCell&)>& on_cell = {});

/// Config for one sweep cell.
RunConfig sweep_cell_config(const RunConfig& cfg, SweepAxis axis, const std::string& value,
                            std::uint64_t seed);
std::vector<std::string> sweep_values(const RunConfig& cfg, SweepAxis axis);

}  // namespace jetrl::harness
