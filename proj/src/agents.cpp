#include "pander/agents.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pander/solver.hpp"

namespace pander {

MlpValueFunction::MlpValueFunction(std::vector<int> layer_sizes)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("mlp: need at least input and output layers");
  for (int s : sizes_)
    if (s < 1) throw std::invalid_argument("mlp: layer sizes must be positive");
  std::size_t count = 0;
  for (std::size_t l = 1; l < sizes_.size(); ++l)
    count += static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l - 1]) +
             static_cast<std::size_t>(sizes_[l]);
  params_.assign(count, 0.0);
}

std::size_t MlpValueFunction::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 1; l < layer; ++l)
    off += static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l - 1]) +
           static_cast<std::size_t>(sizes_[l]);
  return off;
}

void MlpValueFunction::init_params(RngStream& rng) {
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    const int in = sizes_[l - 1];
    const int out = sizes_[l];
    const double scale = std::sqrt(6.0 / static_cast<double>(in + out));
    double* w = params_.data() + weight_offset(l);
    for (int i = 0; i < out * in; ++i)
      w[i] = (2.0 * rng.uniform01() - 1.0) * scale;
    double* b = w + static_cast<std::size_t>(out) * static_cast<std::size_t>(in);
    for (int i = 0; i < out; ++i) b[i] = 0.0;
  }
}

std::vector<double> MlpValueFunction::forward(const std::vector<double>& input) const {
  ForwardCache cache;
  return forward_cached(input, cache);
}

std::vector<double> MlpValueFunction::forward_cached(
    const std::vector<double>& input, ForwardCache& cache) const {
  if (static_cast<int>(input.size()) != sizes_.front())
    throw std::invalid_argument("mlp: input size mismatch");
  cache.activations.assign(sizes_.size(), {});
  cache.activations[0] = input;
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    const int in = sizes_[l - 1];
    const int out = sizes_[l];
    const double* w = params_.data() + weight_offset(l);
    const double* b = w + static_cast<std::size_t>(out) * static_cast<std::size_t>(in);
    const std::vector<double>& x = cache.activations[l - 1];
    std::vector<double>& y = cache.activations[l];
    y.assign(static_cast<std::size_t>(out), 0.0);
    const bool hidden = l + 1 < sizes_.size();
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      for (int i = 0; i < in; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(o)] = hidden && acc < 0.0 ? 0.0 : acc;
    }
  }
  return cache.activations.back();
}

void MlpValueFunction::backward(const ForwardCache& cache,
                                const std::vector<double>& d_output,
                                std::vector<double>& grad) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("mlp: grad buffer size mismatch");
  std::vector<double> delta = d_output;
  for (std::size_t l = sizes_.size() - 1; l >= 1; --l) {
    const int in = sizes_[l - 1];
    const int out = sizes_[l];
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad.data() + weight_offset(l);
    double* gb = gw + static_cast<std::size_t>(out) * static_cast<std::size_t>(in);
    const std::vector<double>& x = cache.activations[l - 1];

    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      double* grow = gw + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      for (int i = 0; i < in; ++i) grow[i] += d * x[static_cast<std::size_t>(i)];
      gb[o] += d;
    }
    if (l == 1) break;

    std::vector<double> d_prev(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      for (int i = 0; i < in; ++i) d_prev[static_cast<std::size_t>(i)] += d * row[i];
    }
    // x is post-ReLU for hidden layers; zero activation means the unit was
    // clipped, so no gradient flows through it.
    for (int i = 0; i < in; ++i)
      if (x[static_cast<std::size_t>(i)] <= 0.0) d_prev[static_cast<std::size_t>(i)] = 0.0;
    delta = std::move(d_prev);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
  if (capacity == 0) throw std::invalid_argument("replay: capacity must be positive");
  data_.resize(capacity);
}

void ReplayBuffer::push(Transition t) {
  data_[next_] = std::move(t);
  next_ += 1;
  if (next_ == data_.size()) {
    next_ = 0;
    full_ = true;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch,
                                                    RngStream& rng) const {
  const std::size_t n = size();
  if (n == 0) throw std::logic_error("replay: sampling from empty buffer");
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(&data_[rng.below(n)]);
  return out;
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0)
    throw std::invalid_argument("train config: learning_rate must be > 0");
  if (batch_size < 1)
    throw std::invalid_argument("train config: batch_size must be >= 1");
  if (buffer_capacity < batch_size)
    throw std::invalid_argument("train config: buffer_capacity must be >= batch_size");
  if (target_sync_interval < 1)
    throw std::invalid_argument("train config: target_sync_interval must be >= 1");
  if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 ||
      epsilon_end > 1.0)
    throw std::invalid_argument("train config: epsilons must be in [0, 1]");
  if (epsilon_decay_steps < 1)
    throw std::invalid_argument("train config: epsilon_decay_steps must be >= 1");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("train config: gamma must be in [0, 1]");
  if (total_training_rounds < 1)
    throw std::invalid_argument("train config: total_training_rounds must be >= 1");
  if (eval_interval < 1)
    throw std::invalid_argument("train config: eval_interval must be >= 1");
  if (hidden_layers.empty())
    throw std::invalid_argument("train config: need at least one hidden layer");
  for (int h : hidden_layers)
    if (h < 1) throw std::invalid_argument("train config: hidden layer sizes must be >= 1");
}

double epsilon_at(long step, const TrainConfig& cfg) {
  if (step >= cfg.epsilon_decay_steps) return cfg.epsilon_end;
  if (step <= 0) return cfg.epsilon_start;
  const double frac = static_cast<double>(step) / static_cast<double>(cfg.epsilon_decay_steps);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

int argmax_action(const MlpValueFunction& net, const Observation& obs) {
  const auto q = net.forward(obs);
  int best = 0;
  for (int a = 1; a < static_cast<int>(q.size()); ++a)
    if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
  return best;
}

int epsilon_greedy(const MlpValueFunction& net, const Observation& obs,
                   double epsilon, RngStream& rng) {
  if (epsilon > 0.0 && rng.uniform01() < epsilon)
    return static_cast<int>(rng.below(static_cast<std::uint64_t>(net.output_size())));
  return argmax_action(net, obs);
}

TdBatchGrad td_loss_and_grad(const MlpValueFunction& online,
                             const MlpValueFunction& target,
                             const std::vector<const Transition*>& batch,
                             double gamma) {
  if (batch.empty()) throw std::invalid_argument("td: empty batch");
  TdBatchGrad out;
  out.grad.assign(online.params().size(), 0.0);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  MlpValueFunction::ForwardCache cache;
  std::vector<double> d_output(static_cast<std::size_t>(online.output_size()), 0.0);
  for (const Transition* tr : batch) {
    double y = tr->reward;
    if (!tr->done) {
      const auto qn = target.forward(tr->next_obs);
      double best = qn[0];
      for (double q : qn) best = q > best ? q : best;
      y += gamma * best;
    }
    const auto q = online.forward_cached(tr->obs, cache);
    const double err = q[static_cast<std::size_t>(tr->action)] - y;
    out.loss += err * err * inv_b;
    d_output.assign(d_output.size(), 0.0);
    d_output[static_cast<std::size_t>(tr->action)] = 2.0 * err * inv_b;
    online.backward(cache, d_output, out.grad);
  }
  return out;
}

AdamOptimizer::AdamOptimizer(std::size_t param_count)
    : m_(param_count, 0.0), v_(param_count, 0.0) {}

void AdamOptimizer::step(std::vector<double>& params,
                         const std::vector<double>& grad,
                         double learning_rate) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("adam: size mismatch");
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  t_ += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= learning_rate * mhat / (std::sqrt(vhat) + kEps);
  }
}

DqnLearner::DqnLearner(int input_size, int action_count, const TrainConfig& cfg,
                       std::uint64_t seed)
    : cfg_(cfg),
      buffer_(static_cast<std::size_t>(cfg.buffer_capacity)),
      adam_(0),
      explore_rng_(seed, "agent-exploration"),
      sample_rng_(seed, "replay-sampling") {
  cfg_.validate();
  std::vector<int> sizes;
  sizes.push_back(input_size);
  sizes.insert(sizes.end(), cfg_.hidden_layers.begin(), cfg_.hidden_layers.end());
  sizes.push_back(action_count);
  online_ = MlpValueFunction(sizes);
  RngStream init_rng(seed, "net-init");
  online_.init_params(init_rng);
  target_ = online_;
  adam_ = AdamOptimizer(online_.params().size());
}

int DqnLearner::act(const Observation& obs) {
  return epsilon_greedy(online_, obs, epsilon(), explore_rng_);
}

void DqnLearner::observe(const Transition& t) {
  buffer_.push(t);
  steps_ += 1;
  if (buffer_.size() >= static_cast<std::size_t>(cfg_.batch_size)) train_once();
  if (steps_ % cfg_.target_sync_interval == 0) target_ = online_;
}

void DqnLearner::train_once() {
  const auto batch = buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), sample_rng_);
  TdBatchGrad g = td_loss_and_grad(online_, target_, batch, cfg_.gamma);
  if (!std::isfinite(g.loss))
    throw TrainingDivergedError("training diverged: non-finite TD loss");
  adam_.step(online_.params(), g.grad, cfg_.learning_rate);
  last_loss_ = g.loss;
}

// ---- Policies --------------------------------------------------------------

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Honest: return "honest";
    case PolicyKind::Random: return "random";
    case PolicyKind::RandomSolver: return "random_solver";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Dqn: return "dqn";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "honest") return PolicyKind::Honest;
  if (s == "random") return PolicyKind::Random;
  if (s == "random_solver") return PolicyKind::RandomSolver;
  if (s == "greedy") return PolicyKind::Greedy;
  if (s == "dqn") return PolicyKind::Dqn;
  throw std::invalid_argument("unknown policy kind: " + s);
}

int joint_action_count(int r, int strategic_count) {
  long count = 1;
  for (int i = 0; i < strategic_count; ++i) {
    count *= r + 1;
    if (count > 65536)
      throw std::invalid_argument("joint malicious action space too large");
  }
  return static_cast<int>(count);
}

std::vector<int> decode_joint_budgets(int joint_action, int r,
                                      int strategic_count) {
  std::vector<int> budgets(static_cast<std::size_t>(strategic_count), 0);
  int rem = joint_action;
  for (int i = 0; i < strategic_count; ++i) {
    budgets[static_cast<std::size_t>(i)] = rem % (r + 1);
    rem /= r + 1;
  }
  return budgets;
}

namespace {

class HonestPolicy final : public AttackPolicy {
 public:
  ActionProfile decide(const PanderEnv& env,
                       const std::vector<Observation>&) override {
    return ActionProfile(static_cast<std::size_t>(env.config().strategic_count));
  }
};

class RandomReportPolicy final : public AttackPolicy {
 public:
  void begin_episode(std::uint64_t seed) override {
    rng_.reseed(seed, "agent-exploration");
  }
  ActionProfile decide(const PanderEnv& env,
                       const std::vector<Observation>&) override {
    ActionProfile actions(static_cast<std::size_t>(env.config().strategic_count));
    for (std::size_t i = 0; i < actions.size(); ++i)
      actions[i].report = random_report(env.candidates()[i].truth, rng_);
    return actions;
  }

 private:
  RngStream rng_;
};

class RandomBudgetPolicy final : public AttackPolicy {
 public:
  void begin_episode(std::uint64_t seed) override {
    rng_.reseed(seed, "agent-exploration");
  }
  ActionProfile decide(const PanderEnv& env,
                       const std::vector<Observation>&) override {
    ActionProfile actions(static_cast<std::size_t>(env.config().strategic_count));
    for (auto& a : actions) a.budget = random_budget(env.config().r, rng_);
    return actions;
  }

 private:
  RngStream rng_;
};

class GreedyPolicy final : public AttackPolicy {
 public:
  ActionProfile decide(const PanderEnv& env,
                       const std::vector<Observation>&) override {
    ActionProfile actions(static_cast<std::size_t>(env.config().strategic_count));
    for (auto& a : actions) a.report = env.majority();
    return actions;
  }
};

class DqnPolicy final : public AttackPolicy {
 public:
  DqnPolicy(Checkpoint ckpt, double epsilon)
      : ckpt_(std::move(ckpt)), net_(net_from_checkpoint(ckpt_)), epsilon_(epsilon) {}

  void begin_episode(std::uint64_t seed) override {
    rng_.reseed(seed, "agent-exploration");
  }

  ActionProfile decide(const PanderEnv& env,
                       const std::vector<Observation>& obs) override {
    const SystemConfig& cfg = env.config();
    if (ckpt_.obs_spec.kind != cfg.strategic_kind || ckpt_.obs_spec.r != cfg.r)
      throw std::invalid_argument("checkpoint does not match environment");
    ActionProfile actions(static_cast<std::size_t>(cfg.strategic_count));
    if (cfg.strategic_kind == CandidateKind::Malicious) {
      if (ckpt_.obs_spec.strategic_count != cfg.strategic_count)
        throw std::invalid_argument(
            "malicious checkpoint trained for a different attacker count");
      const int joint = epsilon_greedy(net_, obs.at(0), epsilon_, rng_);
      const auto budgets = decode_joint_budgets(joint, cfg.r, cfg.strategic_count);
      for (std::size_t i = 0; i < actions.size(); ++i)
        actions[i].budget = budgets[i];
    } else {
      // One shared policy: every selfish candidate acts on its own view.
      for (std::size_t i = 0; i < actions.size(); ++i)
        actions[i].budget = epsilon_greedy(net_, obs.at(i), epsilon_, rng_);
    }
    return actions;
  }

 private:
  Checkpoint ckpt_;
  MlpValueFunction net_;
  double epsilon_;
  RngStream rng_;
};

}  // namespace

std::unique_ptr<AttackPolicy> make_baseline(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Honest: return std::make_unique<HonestPolicy>();
    case PolicyKind::Random: return std::make_unique<RandomReportPolicy>();
    case PolicyKind::RandomSolver: return std::make_unique<RandomBudgetPolicy>();
    case PolicyKind::Greedy: return std::make_unique<GreedyPolicy>();
    case PolicyKind::Dqn: break;
  }
  throw std::invalid_argument("make_baseline: dqn policies come from checkpoints");
}

std::unique_ptr<AttackPolicy> make_dqn_policy(const Checkpoint& ckpt,
                                              double epsilon) {
  return std::make_unique<DqnPolicy>(ckpt, epsilon);
}

// ---- Checkpoints ----------------------------------------------------------

namespace {
std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "pander_checkpoint_v1\n";
  out << "kind " << to_string(ckpt.obs_spec.kind) << "\n";
  out << "r " << ckpt.obs_spec.r << "\n";
  out << "strategic_count " << ckpt.obs_spec.strategic_count << "\n";
  out << "actions " << ckpt.action_count << "\n";
  out << "hidden_activation relu\noutput_activation linear\n";
  out << "layers";
  for (int s : ckpt.layer_sizes) out << ' ' << s;
  out << "\n";
  out << "seed " << ckpt.seed << "\n";
  out << "learning_rate " << fmt_double(ckpt.train.learning_rate) << "\n";
  out << "batch_size " << ckpt.train.batch_size << "\n";
  out << "buffer_capacity " << ckpt.train.buffer_capacity << "\n";
  out << "target_sync_interval " << ckpt.train.target_sync_interval << "\n";
  out << "epsilon_start " << fmt_double(ckpt.train.epsilon_start) << "\n";
  out << "epsilon_end " << fmt_double(ckpt.train.epsilon_end) << "\n";
  out << "epsilon_decay_steps " << ckpt.train.epsilon_decay_steps << "\n";
  out << "gamma " << fmt_double(ckpt.train.gamma) << "\n";
  out << "total_training_rounds " << ckpt.train.total_training_rounds << "\n";
  out << "eval_interval " << ckpt.train.eval_interval << "\n";
  out << "hidden_layers";
  for (int h : ckpt.train.hidden_layers) out << ' ' << h;
  out << "\n";
  out << "params " << ckpt.params.size() << "\n";
  for (std::size_t i = 0; i < ckpt.params.size(); ++i)
    out << fmt_double(ckpt.params[i]) << ((i + 1) % 8 == 0 ? '\n' : ' ');
  if (ckpt.params.size() % 8 != 0) out << '\n';
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string header;
  std::getline(in, header);
  if (header != "pander_checkpoint_v1")
    throw std::runtime_error("unrecognized checkpoint format: " + path);

  Checkpoint ckpt;
  std::string key;
  while (in >> key) {
    if (key == "kind") {
      std::string v;
      in >> v;
      ckpt.obs_spec.kind = candidate_kind_from_string(v);
    } else if (key == "r") {
      in >> ckpt.obs_spec.r;
    } else if (key == "strategic_count") {
      in >> ckpt.obs_spec.strategic_count;
    } else if (key == "actions") {
      in >> ckpt.action_count;
    } else if (key == "hidden_activation" || key == "output_activation") {
      std::string v;
      in >> v;  // informational; this implementation is relu/linear only
    } else if (key == "layers") {
      std::string rest;
      std::getline(in, rest);
      std::istringstream ls(rest);
      int s;
      ckpt.layer_sizes.clear();
      while (ls >> s) ckpt.layer_sizes.push_back(s);
    } else if (key == "seed") {
      in >> ckpt.seed;
    } else if (key == "learning_rate") {
      in >> ckpt.train.learning_rate;
    } else if (key == "batch_size") {
      in >> ckpt.train.batch_size;
    } else if (key == "buffer_capacity") {
      in >> ckpt.train.buffer_capacity;
    } else if (key == "target_sync_interval") {
      in >> ckpt.train.target_sync_interval;
    } else if (key == "epsilon_start") {
      in >> ckpt.train.epsilon_start;
    } else if (key == "epsilon_end") {
      in >> ckpt.train.epsilon_end;
    } else if (key == "epsilon_decay_steps") {
      in >> ckpt.train.epsilon_decay_steps;
    } else if (key == "gamma") {
      in >> ckpt.train.gamma;
    } else if (key == "total_training_rounds") {
      in >> ckpt.train.total_training_rounds;
    } else if (key == "eval_interval") {
      in >> ckpt.train.eval_interval;
    } else if (key == "hidden_layers") {
      std::string rest;
      std::getline(in, rest);
      std::istringstream ls(rest);
      int h;
      ckpt.train.hidden_layers.clear();
      while (ls >> h) ckpt.train.hidden_layers.push_back(h);
    } else if (key == "params") {
      std::size_t count = 0;
      in >> count;
      ckpt.params.assign(count, 0.0);
      for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> ckpt.params[i]))
          throw std::runtime_error("checkpoint truncated: " + path);
      }
    } else {
      throw std::runtime_error("unknown checkpoint field '" + key + "' in " + path);
    }
  }
  if (ckpt.layer_sizes.empty() || ckpt.params.empty())
    throw std::runtime_error("checkpoint missing layers or params: " + path);
  return ckpt;
}

MlpValueFunction net_from_checkpoint(const Checkpoint& ckpt) {
  MlpValueFunction net(ckpt.layer_sizes);
  if (net.params().size() != ckpt.params.size())
    throw std::runtime_error("checkpoint param count does not match layer sizes");
  net.params() = ckpt.params;
  return net;
}

}  // namespace pander
