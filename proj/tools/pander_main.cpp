#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "pander/agents.hpp"
#include "pander/harness.hpp"

using namespace pander;

int main(int argc, char** argv) {
  CLI::App app{"pander: repeated-election simulator and attack evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string seeds_text = "1-10";
  std::string policy_name = "greedy";
  std::string checkpoint_path;
  std::string checkpoint_dir;

  CLI::App* fig1 = app.add_subcommand(
      "fig1", "single-round greedy-pandering scan over the beta1 grid");
  fig1->add_option("--config", config_path, "key = value config file")->required();
  fig1->add_option("--seeds", seeds_text, "seed list, e.g. 1-10 or 3,7,9");
  fig1->add_option("--out", out_path, "metrics CSV path")->required();

  CLI::App* train = app.add_subcommand("train", "train a DQN attacker");
  train->add_option("--config", config_path, "key = value config file")->required();
  train->add_option("--out", out_path, "learning-curve CSV path")->required();
  train->add_option("--checkpoint", checkpoint_path, "checkpoint output path")
      ->required();

  CLI::App* eval = app.add_subcommand("eval", "evaluate one policy across seeds");
  eval->add_option("--config", config_path, "key = value config file")->required();
  eval->add_option("--seeds", seeds_text, "seed list, e.g. 1-10 or 3,7,9");
  eval->add_option("--out", out_path, "metrics CSV path")->required();
  eval->add_option("--policy", policy_name,
                   "honest | random | random_solver | greedy | dqn");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint (for --policy dqn)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "grid over systems x beta1 x attacker kind x attacker count");
  sweep->add_option("--config", config_path, "key = value config file")->required();
  sweep->add_option("--seeds", seeds_text, "seed list, e.g. 1-10 or 3,7,9");
  sweep->add_option("--out", out_path, "metrics CSV path")->required();
  sweep->add_option("--policy", policy_name,
                    "honest | random | random_solver | greedy | dqn");
  sweep->add_option("--checkpoint-dir", checkpoint_dir,
                    "directory with dqn_selfish.ckpt / dqn_malicious_<count>.ckpt");

  try {
    app.parse(argc, argv);

    if (fig1->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const auto seeds = parse_seed_list(seeds_text);
      write_metrics_csv(out_path, run_fig1(cfg, seeds));
    } else if (train->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const TrainResult result = run_training(cfg);
      write_curve_csv(out_path, result.curve);
      save_checkpoint(checkpoint_path, result.checkpoint);
    } else if (eval->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const auto seeds = parse_seed_list(seeds_text);
      const PolicyKind kind = policy_kind_from_string(policy_name);
      PolicyFactory factory;
      if (kind == PolicyKind::Dqn) {
        if (checkpoint_path.empty())
          throw ConfigError("eval --policy dqn needs --checkpoint");
        Checkpoint ckpt;
        try {
          ckpt = load_checkpoint(checkpoint_path);
        } catch (const std::exception& e) {
          throw ConfigError(e.what());
        }
        factory = [ckpt] { return make_dqn_policy(ckpt, 0.0); };
      } else {
        factory = [kind] { return make_baseline(kind); };
      }
      write_metrics_csv(out_path, run_eval("eval", cfg.sys, factory, seeds));
    } else if (sweep->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const auto seeds = parse_seed_list(seeds_text);
      SweepPolicySource source;
      source.kind = policy_kind_from_string(policy_name);
      source.checkpoint_dir = checkpoint_dir;
      write_metrics_csv(out_path, run_sweep(cfg, source, seeds));
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const TrainingDivergedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
