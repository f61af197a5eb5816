#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pander/agents.hpp"
#include "pander/core.hpp"
#include "pander/env.hpp"

namespace pander {

// Bad config files, bad seed lists, missing checkpoints. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One file drives every subcommand: SystemConfig + TrainConfig keys plus the
// experiment grids. Strict `key = value` lines; unknown keys are errors.
struct ExperimentConfig {
  SystemConfig sys;
  TrainConfig train;
  std::vector<double> beta1_grid = {0.8, 0.85, 0.9, 0.95, 0.975, 0.99, 1.0};
  std::vector<System> sweep_systems = {System::RD, System::FRD};
  std::vector<double> sweep_beta1 = {0.9, 0.95};
  std::vector<CandidateKind> sweep_kinds = {CandidateKind::Selfish};
  std::vector<int> sweep_counts = {1, 2, 3};
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// "1-10,42,99" -> {1..10, 42, 99}
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// One experiment cell x seed. Floats are printed with %.6g so repeated runs
// are byte-identical.
struct MetricRow {
  std::string experiment;
  System system = System::RD;
  double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
  std::string strategic_kind;  // "none" when strategic_count == 0
  int strategic_count = 0;
  std::uint64_t seed = 0;
  int episodes = 1;
  double disagreement_fraction = 0.0;
  double mean_strategic_reward = 0.0;
  double stderr_reward = 0.0;
};

std::string csv_header();
std::string csv_row(const MetricRow& row);
void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows);

struct CurvePoint {
  long train_round = 0;
  double eval_mean_reward = 0.0;
  double eval_stderr = 0.0;
  double epsilon = 0.0;
};
void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& points);

// Fraction of issues where the outcome contradicts the (tie-resolved) voter
// majority recorded for that round.
double disagreement_fraction(const IssueVector& outcomes, const IssueVector& majority);

struct EpisodeStats {
  long issues = 0;
  long disagreeing = 0;
  std::vector<double> round_rewards;  // per round, averaged over attackers

  double disagreement() const;
  double mean_reward() const;
  double stderr_reward() const;  // over rounds; 0 for single-round episodes
};

// Plays one full episode of cfg with the policy (reseeded via begin_episode).
EpisodeStats run_episode(const SystemConfig& cfg, AttackPolicy& policy);

MetricRow row_from_episode(const std::string& experiment, const SystemConfig& cfg,
                           const EpisodeStats& stats);

// Single-round baseline attack scan: for every beta1 in cfg.beta1_grid, both
// systems, every seed, one malicious candidate pandering greedily (direct
// majority report). Row order: beta1-major, then RD before FRD, then seeds.
std::vector<MetricRow> run_fig1(const ExperimentConfig& cfg,
                                const std::vector<std::uint64_t>& seeds);

// Deterministic evaluation: one episode per seed, rows in seed order.
// The factory is called once per seed (episodes run in parallel).
using PolicyFactory = std::function<std::unique_ptr<AttackPolicy>()>;
std::vector<MetricRow> run_eval(const std::string& experiment,
                                const SystemConfig& cfg,
                                const PolicyFactory& make_policy,
                                const std::vector<std::uint64_t>& seeds);

// DQN training on cfg.sys (selfish: exactly one learner; malicious: one
// joint learner over all attackers). Periodic greedy evaluation on held-out
// derived seeds produces the learning curve.
struct TrainResult {
  std::vector<CurvePoint> curve;
  Checkpoint checkpoint;
};
TrainResult run_training(const ExperimentConfig& cfg);

// Where sweep cells get their attack policy. Dqn reads one checkpoint per
// (kind, count) from checkpoint_dir: dqn_selfish.ckpt is shared across
// counts, dqn_malicious_<count>.ckpt is per count.
struct SweepPolicySource {
  PolicyKind kind = PolicyKind::Greedy;
  std::string checkpoint_dir;
};

// Full grid {sweep_systems} x {sweep_beta1} x {sweep_kinds} x {sweep_counts}
// x seeds, one row per cell x seed, in that nesting order.
std::vector<MetricRow> run_sweep(const ExperimentConfig& cfg,
                                 const SweepPolicySource& source,
                                 const std::vector<std::uint64_t>& seeds);

// Deterministic-result parallel map: fn(i) for i in [0, tasks), results must
// be written into pre-sized slots by index.
void parallel_for(int tasks, const std::function<void(int)>& fn);

}  // namespace pander
