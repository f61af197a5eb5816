#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pander/core.hpp"
#include "pander/env.hpp"
#include "pander/rng.hpp"

namespace pander {

// Fully-connected net: ReLU hidden layers, linear output. Parameters live in
// one flat vector laid out layer by layer, weights (out x in, row-major)
// then biases, so optimizers and checkpoints can treat them opaquely.
class MlpValueFunction {
 public:
  MlpValueFunction() = default;
  explicit MlpValueFunction(std::vector<int> layer_sizes);

  // Xavier-uniform weights, zero biases.
  void init_params(RngStream& rng);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::vector<double> forward(const std::vector<double>& input) const;

  struct ForwardCache {
    // activations[0] = input, activations[l] = layer l output (post-ReLU for
    // hidden layers, raw for the last). Enough for the backward pass since
    // relu'(z) == 1[relu(z) > 0].
    std::vector<std::vector<double>> activations;
  };
  std::vector<double> forward_cached(const std::vector<double>& input,
                                     ForwardCache& cache) const;
  // Accumulates dLoss/dparams into grad (same layout as params) given
  // dLoss/doutput at the cached point.
  void backward(const ForwardCache& cache, const std::vector<double>& d_output,
                std::vector<double>& grad) const;

 private:
  std::size_t weight_offset(std::size_t layer) const;
  std::vector<int> sizes_;
  std::vector<double> params_;
};

struct Transition {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  Observation next_obs;  // ignored when done
  bool done = false;
};

// Fixed-capacity ring buffer with uniform (with-replacement) sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const { return full_ ? data_.size() : next_; }
  const Transition& at(std::size_t i) const { return data_[i]; }
  std::vector<const Transition*> sample(std::size_t batch, RngStream& rng) const;

 private:
  std::vector<Transition> data_;
  std::size_t next_ = 0;
  bool full_ = false;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int buffer_capacity = 50000;
  int target_sync_interval = 500;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_steps = 20000;
  double gamma = 1.0;
  int total_training_rounds = 50000;
  int eval_interval = 2500;
  std::vector<int> hidden_layers = {64, 64};

  void validate() const;  // throws std::invalid_argument
};

// Piecewise-linear decay from epsilon_start to epsilon_end over
// epsilon_decay_steps environment steps, flat afterwards.
double epsilon_at(long step, const TrainConfig& cfg);

// Greedy action (lowest index wins ties).
int argmax_action(const MlpValueFunction& net, const Observation& obs);

// With probability epsilon a uniform action, otherwise argmax. epsilon == 0
// consumes no randomness.
int epsilon_greedy(const MlpValueFunction& net, const Observation& obs,
                   double epsilon, RngStream& rng);

struct TdBatchGrad {
  double loss = 0.0;             // mean squared TD error over the batch
  std::vector<double> grad;      // dLoss/dparams of the online net
};

// One-step TD targets y = reward + gamma * max_a' target(next_obs) (terminal
// transitions use y = reward); loss = mean (online(obs)[action] - y)^2.
TdBatchGrad td_loss_and_grad(const MlpValueFunction& online,
                             const MlpValueFunction& target,
                             const std::vector<const Transition*>& batch,
                             double gamma);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(std::size_t param_count);
  void step(std::vector<double>& params, const std::vector<double>& grad,
            double learning_rate);

 private:
  std::vector<double> m_, v_;
  long t_ = 0;
};

struct TrainingDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// DQN: online/target nets, replay, Adam, epsilon schedule. Fully
// deterministic given (seed, config): exploration, replay sampling and
// initialization each use their own named substream.
class DqnLearner {
 public:
  DqnLearner(int input_size, int action_count, const TrainConfig& cfg,
             std::uint64_t seed);

  int act(const Observation& obs);      // schedule-driven epsilon-greedy
  void observe(const Transition& t);    // store + train + target sync
  double epsilon() const { return epsilon_at(steps_, cfg_); }
  long steps() const { return steps_; }
  double last_loss() const { return last_loss_; }
  const MlpValueFunction& online() const { return online_; }
  const MlpValueFunction& target() const { return target_; }

 private:
  void train_once();

  TrainConfig cfg_;
  MlpValueFunction online_, target_;
  ReplayBuffer buffer_;
  AdamOptimizer adam_;
  RngStream explore_rng_, sample_rng_;
  long steps_ = 0;
  double last_loss_ = 0.0;
};

// ---- Attack policies -------------------------------------------------------

enum class PolicyKind { Honest, Random, RandomSolver, Greedy, Dqn };
const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

// Maps observations to one action per strategic candidate. Policies with
// randomness draw from a stream reseeded in begin_episode so evaluation runs
// are reproducible per seed.
class AttackPolicy {
 public:
  virtual ~AttackPolicy() = default;
  virtual void begin_episode(std::uint64_t seed) { (void)seed; }
  virtual ActionProfile decide(const PanderEnv& env,
                               const std::vector<Observation>& obs) = 0;
};

// honest: budget 0 | random: direct uniform report | random_solver: uniform
// budget through the solver | greedy: direct majority report.
std::unique_ptr<AttackPolicy> make_baseline(PolicyKind kind);

// Joint malicious actions are encoded base (r+1): candidate 0 in the least
// significant digit.
int joint_action_count(int r, int strategic_count);
std::vector<int> decode_joint_budgets(int joint_action, int r,
                                      int strategic_count);

struct Checkpoint {
  ObservationSpec obs_spec;
  int action_count = 0;
  std::vector<int> layer_sizes;
  std::vector<double> params;
  TrainConfig train;
  std::uint64_t seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);
MlpValueFunction net_from_checkpoint(const Checkpoint& ckpt);

// Greedy (or epsilon-soft) policy backed by a trained net. For selfish specs
// the same net acts for every strategic candidate; for malicious it picks
// the joint action and splits it into per-candidate budgets.
std::unique_ptr<AttackPolicy> make_dqn_policy(const Checkpoint& ckpt,
                                              double epsilon);

}  // namespace pander
