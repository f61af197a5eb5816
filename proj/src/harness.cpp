#include "pander/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace pander {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
  }
}

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");

    try {
      if (key == "n") cfg.sys.n = static_cast<int>(parse_long(key, value));
      else if (key == "m") cfg.sys.m = static_cast<int>(parse_long(key, value));
      else if (key == "k") cfg.sys.k = static_cast<int>(parse_long(key, value));
      else if (key == "r") cfg.sys.r = static_cast<int>(parse_long(key, value));
      else if (key == "rounds") cfg.sys.rounds = static_cast<int>(parse_long(key, value));
      else if (key == "system") cfg.sys.system = system_from_string(value);
      else if (key == "beta1") cfg.sys.beta1 = parse_double(key, value);
      else if (key == "beta2") cfg.sys.beta2 = parse_double(key, value);
      else if (key == "beta3") cfg.sys.beta3 = parse_double(key, value);
      else if (key == "p") cfg.sys.p = parse_double(key, value);
      else if (key == "strategic_count")
        cfg.sys.strategic_count = static_cast<int>(parse_long(key, value));
      else if (key == "strategic_kind")
        cfg.sys.strategic_kind = candidate_kind_from_string(value);
      else if (key == "seed") cfg.sys.seed = static_cast<std::uint64_t>(parse_long(key, value));
      else if (key == "learning_rate") cfg.train.learning_rate = parse_double(key, value);
      else if (key == "batch_size") cfg.train.batch_size = static_cast<int>(parse_long(key, value));
      else if (key == "buffer_capacity")
        cfg.train.buffer_capacity = static_cast<int>(parse_long(key, value));
      else if (key == "target_sync_interval")
        cfg.train.target_sync_interval = static_cast<int>(parse_long(key, value));
      else if (key == "epsilon_start") cfg.train.epsilon_start = parse_double(key, value);
      else if (key == "epsilon_end") cfg.train.epsilon_end = parse_double(key, value);
      else if (key == "epsilon_decay_steps")
        cfg.train.epsilon_decay_steps = static_cast<int>(parse_long(key, value));
      else if (key == "gamma") cfg.train.gamma = parse_double(key, value);
      else if (key == "total_training_rounds")
        cfg.train.total_training_rounds = static_cast<int>(parse_long(key, value));
      else if (key == "eval_interval")
        cfg.train.eval_interval = static_cast<int>(parse_long(key, value));
      else if (key == "hidden_layers") {
        cfg.train.hidden_layers.clear();
        for (const auto& part : split_commas(value))
          cfg.train.hidden_layers.push_back(static_cast<int>(parse_long(key, part)));
      } else if (key == "beta1_grid") {
        cfg.beta1_grid.clear();
        for (const auto& part : split_commas(value))
          cfg.beta1_grid.push_back(parse_double(key, part));
      } else if (key == "sweep_systems") {
        cfg.sweep_systems.clear();
        for (const auto& part : split_commas(value))
          cfg.sweep_systems.push_back(system_from_string(part));
      } else if (key == "sweep_beta1") {
        cfg.sweep_beta1.clear();
        for (const auto& part : split_commas(value))
          cfg.sweep_beta1.push_back(parse_double(key, part));
      } else if (key == "sweep_kinds") {
        cfg.sweep_kinds.clear();
        for (const auto& part : split_commas(value))
          cfg.sweep_kinds.push_back(candidate_kind_from_string(part));
      } else if (key == "sweep_counts") {
        cfg.sweep_counts.clear();
        for (const auto& part : split_commas(value))
          cfg.sweep_counts.push_back(static_cast<int>(parse_long(key, part)));
      } else {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }

  try {
    cfg.sys.validate();
    cfg.train.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str());
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split_commas(text)) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(static_cast<std::uint64_t>(parse_long("seeds", part)));
    } else {
      const long lo = parse_long("seeds", trim(part.substr(0, dash)));
      const long hi = parse_long("seeds", trim(part.substr(dash + 1)));
      if (lo > hi) throw ConfigError("seeds: empty range '" + part + "'");
      for (long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (seeds.empty()) throw ConfigError("seeds: none given");
  return seeds;
}

std::string csv_header() {
  return "experiment,system,beta1,beta2,beta3,strategic_kind,strategic_count,"
         "seed,episodes,disagreement_fraction,mean_strategic_reward,stderr_reward";
}

std::string csv_row(const MetricRow& row) {
  std::ostringstream os;
  os << row.experiment << ',' << to_string(row.system) << ',' << fmt_g(row.beta1)
     << ',' << fmt_g(row.beta2) << ',' << fmt_g(row.beta3) << ','
     << row.strategic_kind << ',' << row.strategic_count << ',' << row.seed << ','
     << row.episodes << ',' << fmt_g(row.disagreement_fraction) << ','
     << fmt_g(row.mean_strategic_reward) << ',' << fmt_g(row.stderr_reward);
  return os.str();
}

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file: " + path);
  out << csv_header() << '\n';
  for (const auto& row : rows) out << csv_row(row) << '\n';
  if (!out) throw ConfigError("write failed: " + path);
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& points) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file: " + path);
  out << "train_round,eval_mean_reward,eval_stderr,epsilon\n";
  for (const auto& pt : points)
    out << pt.train_round << ',' << fmt_g(pt.eval_mean_reward) << ','
        << fmt_g(pt.eval_stderr) << ',' << fmt_g(pt.epsilon) << '\n';
  if (!out) throw ConfigError("write failed: " + path);
}

double disagreement_fraction(const IssueVector& outcomes, const IssueVector& majority) {
  return static_cast<double>(hamming(outcomes, majority)) /
         static_cast<double>(outcomes.size());
}

double EpisodeStats::disagreement() const {
  return issues == 0 ? 0.0 : static_cast<double>(disagreeing) / static_cast<double>(issues);
}

double EpisodeStats::mean_reward() const {
  if (round_rewards.empty()) return 0.0;
  double s = 0.0;
  for (double x : round_rewards) s += x;
  return s / static_cast<double>(round_rewards.size());
}

double EpisodeStats::stderr_reward() const {
  const std::size_t q = round_rewards.size();
  if (q < 2) return 0.0;
  const double mu = mean_reward();
  double ss = 0.0;
  for (double x : round_rewards) ss += (x - mu) * (x - mu);
  const double var = ss / static_cast<double>(q - 1);
  return std::sqrt(var / static_cast<double>(q));
}

EpisodeStats run_episode(const SystemConfig& cfg, AttackPolicy& policy) {
  PanderEnv env(cfg);
  policy.begin_episode(cfg.seed);
  EpisodeStats stats;
  std::vector<Observation> obs = env.observations();
  while (!env.done()) {
    const ActionProfile actions = policy.decide(env, obs);
    const StepResult sr = env.step(actions);
    stats.issues += cfg.r;
    stats.disagreeing += hamming(sr.ledger.outcomes, sr.majority);
    double round_reward = 0.0;
    for (double rw : sr.rewards) round_reward += rw;
    if (!sr.rewards.empty()) round_reward /= static_cast<double>(sr.rewards.size());
    stats.round_rewards.push_back(round_reward);
    obs = sr.observations;
  }
  return stats;
}

MetricRow row_from_episode(const std::string& experiment, const SystemConfig& cfg,
                           const EpisodeStats& stats) {
  MetricRow row;
  row.experiment = experiment;
  row.system = cfg.system;
  row.beta1 = cfg.beta1;
  row.beta2 = cfg.beta2;
  row.beta3 = cfg.beta3;
  row.strategic_kind =
      cfg.strategic_count > 0 ? to_string(cfg.strategic_kind) : "none";
  row.strategic_count = cfg.strategic_count;
  row.seed = cfg.seed;
  row.episodes = 1;
  row.disagreement_fraction = stats.disagreement();
  row.mean_strategic_reward = stats.mean_reward();
  row.stderr_reward = stats.stderr_reward();
  return row;
}

void parallel_for(int tasks, const std::function<void(int)>& fn) {
  if (tasks <= 0) return;
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min(tasks, static_cast<int>(hw == 0 ? 1 : hw));
  if (workers <= 1) {
    for (int i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<MetricRow> run_fig1(const ExperimentConfig& cfg,
                                const std::vector<std::uint64_t>& seeds) {
  SystemConfig base = cfg.sys;
  base.rounds = 1;
  base.strategic_count = 1;
  base.strategic_kind = CandidateKind::Malicious;

  struct Task {
    SystemConfig cfg;
  };
  std::vector<Task> tasks;
  for (double b1 : cfg.beta1_grid) {
    for (System sys : {System::RD, System::FRD}) {
      for (std::uint64_t seed : seeds) {
        SystemConfig c = base;
        c.beta1 = b1;
        c.system = sys;
        c.seed = seed;
        tasks.push_back({c});
      }
    }
  }

  std::vector<MetricRow> rows(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), [&](int i) {
    const auto policy = make_baseline(PolicyKind::Greedy);
    const EpisodeStats stats = run_episode(tasks[static_cast<std::size_t>(i)].cfg, *policy);
    rows[static_cast<std::size_t>(i)] =
        row_from_episode("fig1", tasks[static_cast<std::size_t>(i)].cfg, stats);
  });
  return rows;
}

std::vector<MetricRow> run_eval(const std::string& experiment,
                                const SystemConfig& cfg,
                                const PolicyFactory& make_policy,
                                const std::vector<std::uint64_t>& seeds) {
  std::vector<MetricRow> rows(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), [&](int i) {
    SystemConfig c = cfg;
    c.seed = seeds[static_cast<std::size_t>(i)];
    const auto policy = make_policy();
    const EpisodeStats stats = run_episode(c, *policy);
    rows[static_cast<std::size_t>(i)] = row_from_episode(experiment, c, stats);
  });
  return rows;
}

namespace {

// Greedy evaluation of the current net on held-out derived seeds; returns
// (mean, stderr) over episode mean rewards.
std::pair<double, double> training_eval(const SystemConfig& sys,
                                        const Checkpoint& ckpt,
                                        int episodes) {
  std::vector<double> means(static_cast<std::size_t>(episodes), 0.0);
  for (int j = 0; j < episodes; ++j) {
    SystemConfig c = sys;
    c.seed = RngStream(sys.seed, "train-eval", static_cast<std::uint64_t>(j)).next();
    const auto policy = make_dqn_policy(ckpt, 0.0);
    means[static_cast<std::size_t>(j)] = run_episode(c, *policy).mean_reward();
  }
  double mu = 0.0;
  for (double x : means) mu += x;
  mu /= static_cast<double>(episodes);
  double ss = 0.0;
  for (double x : means) ss += (x - mu) * (x - mu);
  const double se = episodes > 1
      ? std::sqrt(ss / static_cast<double>(episodes - 1) / static_cast<double>(episodes))
      : 0.0;
  return {mu, se};
}

}  // namespace

TrainResult run_training(const ExperimentConfig& cfg) {
  const SystemConfig& sys = cfg.sys;
  try {
    sys.validate();
    cfg.train.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (sys.strategic_count < 1)
    throw ConfigError("training requires at least one strategic candidate");
  if (sys.strategic_kind == CandidateKind::Selfish && sys.strategic_count != 1)
    throw ConfigError(
        "selfish training uses strategic_count = 1; evaluation replicates the "
        "shared policy across attackers");

  const ObservationSpec spec{sys.strategic_kind, sys.r, sys.strategic_count};
  const bool malicious = sys.strategic_kind == CandidateKind::Malicious;
  const int action_count =
      malicious ? joint_action_count(sys.r, sys.strategic_count) : sys.r + 1;

  DqnLearner learner(spec.length(), action_count, cfg.train, sys.seed);

  auto current_checkpoint = [&]() {
    Checkpoint ckpt;
    ckpt.obs_spec = spec;
    ckpt.action_count = action_count;
    ckpt.layer_sizes = learner.online().layer_sizes();
    ckpt.params = learner.online().params();
    ckpt.train = cfg.train;
    ckpt.seed = sys.seed;
    return ckpt;
  };

  constexpr int kEvalEpisodes = 5;
  TrainResult result;
  auto emit_curve_point = [&](long round) {
    const auto [mu, se] = training_eval(sys, current_checkpoint(), kEvalEpisodes);
    result.curve.push_back({round, mu, se, learner.epsilon()});
  };

  emit_curve_point(0);
  long rounds_done = 0;
  std::uint64_t episode_index = 0;
  while (rounds_done < cfg.train.total_training_rounds) {
    SystemConfig ep_cfg = sys;
    ep_cfg.seed = RngStream(sys.seed, "train-episode", episode_index).next();
    ++episode_index;
    PanderEnv env(ep_cfg);
    std::vector<Observation> obs = env.observations();
    while (!env.done() && rounds_done < cfg.train.total_training_rounds) {
      const int action = learner.act(obs.at(0));
      ActionProfile actions(static_cast<std::size_t>(sys.strategic_count));
      if (malicious) {
        const auto budgets =
            decode_joint_budgets(action, sys.r, sys.strategic_count);
        for (std::size_t i = 0; i < actions.size(); ++i)
          actions[i].budget = budgets[i];
      } else {
        actions[0].budget = action;
      }
      const StepResult sr = env.step(actions);

      Transition tr;
      tr.obs = std::move(obs.at(0));
      tr.action = action;
      tr.reward = sr.rewards.at(0);
      tr.done = sr.done;
      if (!sr.done) tr.next_obs = sr.observations.at(0);
      learner.observe(tr);

      obs = sr.observations;
      rounds_done += 1;
      if (rounds_done % cfg.train.eval_interval == 0 ||
          rounds_done == cfg.train.total_training_rounds) {
        emit_curve_point(rounds_done);
      }
    }
  }

  result.checkpoint = current_checkpoint();
  return result;
}

std::vector<MetricRow> run_sweep(const ExperimentConfig& cfg,
                                 const SweepPolicySource& source,
                                 const std::vector<std::uint64_t>& seeds) {
  // Checkpoints are loaded up front so a missing file fails fast and names
  // the cell that needed it.
  std::map<std::pair<int, int>, Checkpoint> checkpoints;  // (kind, count)
  if (source.kind == PolicyKind::Dqn) {
    for (CandidateKind kind : cfg.sweep_kinds) {
      for (int count : cfg.sweep_counts) {
        if (count == 0) continue;
        const std::string name =
            kind == CandidateKind::Malicious
                ? "dqn_malicious_" + std::to_string(count) + ".ckpt"
                : "dqn_selfish.ckpt";
        const std::string path = source.checkpoint_dir.empty()
                                     ? name
                                     : source.checkpoint_dir + "/" + name;
        const auto key = std::make_pair(static_cast<int>(kind), count);
        if (checkpoints.count(key)) continue;
        try {
          checkpoints[key] = load_checkpoint(path);
        } catch (const std::exception& e) {
          throw ConfigError("sweep cell kind=" + std::string(to_string(kind)) +
                            " strategic_count=" + std::to_string(count) +
                            " needs a checkpoint: " + e.what());
        }
      }
    }
  }

  struct Task {
    SystemConfig cfg;
  };
  std::vector<Task> tasks;
  for (System sys : cfg.sweep_systems) {
    for (double b1 : cfg.sweep_beta1) {
      for (CandidateKind kind : cfg.sweep_kinds) {
        for (int count : cfg.sweep_counts) {
          for (std::uint64_t seed : seeds) {
            SystemConfig c = cfg.sys;
            c.system = sys;
            c.beta1 = b1;
            c.strategic_kind = count > 0 ? kind : CandidateKind::Selfish;
            c.strategic_count = count;
            c.seed = seed;
            tasks.push_back({c});
          }
        }
      }
    }
  }

  std::vector<MetricRow> rows(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), [&](int i) {
    const SystemConfig& c = tasks[static_cast<std::size_t>(i)].cfg;
    std::unique_ptr<AttackPolicy> policy;
    if (c.strategic_count == 0) {
      policy = make_baseline(PolicyKind::Honest);
    } else if (source.kind == PolicyKind::Dqn) {
      const auto key = std::make_pair(static_cast<int>(c.strategic_kind),
                                      c.strategic_count);
      policy = make_dqn_policy(checkpoints.at(key), 0.0);
    } else {
      policy = make_baseline(source.kind);
    }
    const EpisodeStats stats = run_episode(c, *policy);
    rows[static_cast<std::size_t>(i)] = row_from_episode("sweep", c, stats);
  });
  return rows;
}

}  // namespace pander
