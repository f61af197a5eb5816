#include "pander/env.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "pander/solver.hpp"

namespace pander {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string bits_to_string(const IssueVector& v) {
  std::string s;
  s.reserve(v.size());
  for (Bit b : v) s.push_back(b ? '1' : '0');
  return s;
}

IssueVector bits_from_string(const std::string& s) {
  IssueVector v;
  v.reserve(s.size());
  for (char ch : s) {
    if (ch != '0' && ch != '1')
      throw std::invalid_argument("snapshot: bad bit string");
    v.push_back(ch == '1' ? 1 : 0);
  }
  return v;
}

}  // namespace

bool elected_by_pandering(int candidate, const RoundProfile& profile,
                          const std::vector<IssueVector>& reports,
                          const IssueVector& truth,
                          const std::vector<double>& credibilities, int k,
                          const std::vector<int>& priority) {
  const Committee actual =
      elect_with_priority(tally(profile, reports, credibilities), k, priority);
  if (!actual.contains(candidate)) return false;
  std::vector<IssueVector> honest = reports;
  honest[static_cast<std::size_t>(candidate)] = truth;
  const Committee counterfactual =
      elect_with_priority(tally(profile, honest, credibilities), k, priority);
  return !counterfactual.contains(candidate);
}

std::vector<double> issue_support(const RoundProfile& profile) {
  const int n = profile.voter_count();
  const int r = profile.issue_count();
  std::vector<double> support(static_cast<std::size_t>(r), 0.0);
  for (const auto& voter : profile.voters)
    for (int t = 0; t < r; ++t) support[static_cast<std::size_t>(t)] += voter[static_cast<std::size_t>(t)];
  for (auto& s : support) s /= static_cast<double>(n);
  return support;
}

PanderEnv::PanderEnv(const SystemConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  reset();
}

std::vector<Observation> PanderEnv::reset() {
  profile_rng_.reseed(cfg_.seed, "profile-sampling");
  truth_rng_.reseed(cfg_.seed, "candidate-truths");
  elect_rng_.reseed(cfg_.seed, "election-tie");
  majority_rng_.reseed(cfg_.seed, "majority-tie");
  outcome_rng_.reseed(cfg_.seed, "outcome-tie");
  round_ = 0;
  done_ = false;

  candidates_.assign(static_cast<std::size_t>(cfg_.m), CandidateState{});
  for (int c = 0; c < cfg_.m; ++c) {
    candidates_[static_cast<std::size_t>(c)].id = c;
    candidates_[static_cast<std::size_t>(c)].kind =
        c < cfg_.strategic_count ? cfg_.strategic_kind : CandidateKind::Truthful;
    candidates_[static_cast<std::size_t>(c)].credibility = 1.0;
  }
  sample_round();
  return observations();
}

void PanderEnv::sample_round() {
  profile_ = sample_profile(cfg_.n, cfg_.r, cfg_.p, profile_rng_);
  majority_ = majority_vector(profile_, majority_rng_);
  // Truths are drawn for every candidate so the stream stays aligned across
  // strategic-kind variations of the same seed; malicious candidates then
  // take the anti-majority stance instead.
  for (auto& cand : candidates_) {
    cand.truth = sample_issue_vector(cfg_.r, cfg_.p, truth_rng_);
    if (cand.kind == CandidateKind::Malicious) {
      cand.truth.assign(majority_.begin(), majority_.end());
      for (auto& b : cand.truth) b ^= 1;
    }
    cand.report = cand.truth;
  }
}

int PanderEnv::agent_slots() const {
  if (cfg_.strategic_count == 0) return 0;
  return cfg_.strategic_kind == CandidateKind::Malicious ? 1 : cfg_.strategic_count;
}

ObservationSpec PanderEnv::observation_spec() const {
  return {cfg_.strategic_kind, cfg_.r, cfg_.strategic_count};
}

std::vector<Observation> PanderEnv::observations() const {
  std::vector<Observation> obs;
  if (done_ || cfg_.strategic_count == 0) return obs;
  const auto support = issue_support(profile_);
  const double round_frac =
      static_cast<double>(round_) / static_cast<double>(cfg_.rounds);

  if (cfg_.strategic_kind == CandidateKind::Malicious) {
    Observation o;
    o.reserve(static_cast<std::size_t>(observation_spec().length()));
    o.insert(o.end(), support.begin(), support.end());
    for (int c = 0; c < cfg_.strategic_count; ++c)
      o.push_back(candidates_[static_cast<std::size_t>(c)].credibility);
    o.push_back(round_frac);
    obs.push_back(std::move(o));
  } else {
    for (int c = 0; c < cfg_.strategic_count; ++c) {
      Observation o;
      o.reserve(static_cast<std::size_t>(observation_spec().length()));
      o.insert(o.end(), support.begin(), support.end());
      for (Bit b : candidates_[static_cast<std::size_t>(c)].truth)
        o.push_back(static_cast<double>(b));
      o.push_back(candidates_[static_cast<std::size_t>(c)].credibility);
      o.push_back(round_frac);
      obs.push_back(std::move(o));
    }
  }
  return obs;
}

StepResult PanderEnv::step(const ActionProfile& actions) {
  if (done_) throw std::logic_error("step: episode is already done");
  if (static_cast<int>(actions.size()) != cfg_.strategic_count)
    throw std::invalid_argument("step: one action per strategic candidate required");

  // 1. Reports: strategic candidates pander (exact solver on their budget,
  //    or a direct report from a baseline); the rest already report truth.
  for (int c = 0; c < cfg_.strategic_count; ++c) {
    CandidateState& cand = candidates_[static_cast<std::size_t>(c)];
    const AgentAction& act = actions[static_cast<std::size_t>(c)];
    if (act.report) {
      if (static_cast<int>(act.report->size()) != cfg_.r)
        throw std::invalid_argument("step: direct report has wrong length");
      cand.report = *act.report;
    } else {
      if (act.budget < 0 || act.budget > cfg_.r)
        throw std::invalid_argument("step: budget must be in [0, r]");
      cand.report = cmap_solve(profile_, cand.truth, act.budget).report;
    }
  }

  std::vector<IssueVector> reports, honest_reports;
  std::vector<double> credibilities;
  reports.reserve(candidates_.size());
  credibilities.reserve(candidates_.size());
  for (const auto& cand : candidates_) {
    reports.push_back(cand.report);
    credibilities.push_back(cand.credibility);
  }
  honest_reports = reports;
  for (int c = 0; c < cfg_.strategic_count; ++c)
    honest_reports[static_cast<std::size_t>(c)] = candidates_[static_cast<std::size_t>(c)].truth;

  // 2. Elections, actual and all-honest, under one frozen tie permutation.
  const std::vector<int> priority = elect_rng_.permutation(cfg_.m);
  const Committee committee = elect_with_priority(
      tally(profile_, reports, credibilities), cfg_.k, priority);
  const Committee cf_committee = elect_with_priority(
      tally(profile_, honest_reports, credibilities), cfg_.k, priority);

  StepResult result;
  result.committee = committee;
  result.counterfactual_committee = cf_committee;
  result.majority = majority_;
  result.elected_by_pandering.assign(static_cast<std::size_t>(cfg_.strategic_count), 0);
  for (int c = 0; c < cfg_.strategic_count; ++c) {
    if (!committee.contains(c)) continue;
    std::vector<IssueVector> solo_honest = reports;
    solo_honest[static_cast<std::size_t>(c)] = candidates_[static_cast<std::size_t>(c)].truth;
    const Committee without_pander = elect_with_priority(
        tally(profile_, solo_honest, credibilities), cfg_.k, priority);
    result.elected_by_pandering[static_cast<std::size_t>(c)] =
        without_pander.contains(c) ? 0 : 1;
  }

  // 3. Governance, actual and counterfactual. The counterfactual branches
  //    from the same round-start candidate state and replays the same
  //    outcome tie-break draws via a copied stream.
  std::vector<CandidateState> cf_candidates = candidates_;
  for (int c = 0; c < cfg_.strategic_count; ++c)
    cf_candidates[static_cast<std::size_t>(c)].report =
        cf_candidates[static_cast<std::size_t>(c)].truth;
  RngStream cf_outcome_rng = outcome_rng_;

  result.ledger = run_round(cfg_, profile_, candidates_, committee, outcome_rng_);
  const RoundLedger cf_ledger =
      run_round(cfg_, profile_, cf_candidates, cf_committee, cf_outcome_rng);
  result.counterfactual_outcomes = cf_ledger.outcomes;

  // 4. Rewards.
  result.rewards.assign(static_cast<std::size_t>(cfg_.strategic_count), 0.0);
  if (cfg_.strategic_kind == CandidateKind::Malicious && cfg_.strategic_count > 0) {
    const double shared =
        static_cast<double>(hamming(result.ledger.outcomes, result.counterfactual_outcomes)) /
        static_cast<double>(cfg_.r);
    for (auto& rw : result.rewards) rw = shared;
  } else {
    for (int c = 0; c < cfg_.strategic_count; ++c) {
      if (!result.elected_by_pandering[static_cast<std::size_t>(c)]) continue;
      result.rewards[static_cast<std::size_t>(c)] =
          agreement(result.ledger.outcomes, candidates_[static_cast<std::size_t>(c)].truth);
    }
  }

  // 5. Advance.
  round_ += 1;
  done_ = round_ >= cfg_.rounds;
  if (!done_) sample_round();
  result.done = done_;
  result.observations = observations();
  return result;
}

std::string PanderEnv::snapshot() const {
  std::ostringstream os;
  os << "pander_env_snapshot_v1\n";
  os << "n " << cfg_.n << "\nm " << cfg_.m << "\nk " << cfg_.k << "\nr "
     << cfg_.r << "\nrounds " << cfg_.rounds << "\n";
  os << "system " << to_string(cfg_.system) << "\n";
  os << "beta1 " << fmt_double(cfg_.beta1) << "\nbeta2 " << fmt_double(cfg_.beta2)
     << "\nbeta3 " << fmt_double(cfg_.beta3) << "\np " << fmt_double(cfg_.p) << "\n";
  os << "strategic_count " << cfg_.strategic_count << "\n";
  os << "strategic_kind " << to_string(cfg_.strategic_kind) << "\n";
  os << "seed " << cfg_.seed << "\n";
  os << "round " << round_ << "\ndone " << (done_ ? 1 : 0) << "\n";
  os << "rng_profile " << profile_rng_.serialize() << "\n";
  os << "rng_truth " << truth_rng_.serialize() << "\n";
  os << "rng_elect " << elect_rng_.serialize() << "\n";
  os << "rng_majority " << majority_rng_.serialize() << "\n";
  os << "rng_outcome " << outcome_rng_.serialize() << "\n";
  os << "majority " << bits_to_string(majority_) << "\n";
  for (const auto& voter : profile_.voters)
    os << "voter " << bits_to_string(voter) << "\n";
  for (const auto& cand : candidates_)
    os << "candidate " << to_string(cand.kind) << ' ' << fmt_double(cand.credibility)
       << ' ' << bits_to_string(cand.truth) << ' ' << bits_to_string(cand.report)
       << "\n";
  return os.str();
}

PanderEnv PanderEnv::restore(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next_line = [&](const char* what) -> std::string {
    if (!std::getline(is, line))
      throw std::invalid_argument(std::string("snapshot: missing ") + what);
    return line;
  };
  auto expect_field = [&](const char* key) -> std::string {
    std::istringstream ls(next_line(key));
    std::string k, v;
    ls >> k;
    if (k != key) throw std::invalid_argument("snapshot: expected field " + std::string(key));
    std::getline(ls, v);
    const auto pos = v.find_first_not_of(' ');
    return pos == std::string::npos ? std::string() : v.substr(pos);
  };

  if (next_line("header") != "pander_env_snapshot_v1")
    throw std::invalid_argument("snapshot: unrecognized header");

  SystemConfig cfg;
  cfg.n = std::stoi(expect_field("n"));
  cfg.m = std::stoi(expect_field("m"));
  cfg.k = std::stoi(expect_field("k"));
  cfg.r = std::stoi(expect_field("r"));
  cfg.rounds = std::stoi(expect_field("rounds"));
  cfg.system = system_from_string(expect_field("system"));
  cfg.beta1 = std::stod(expect_field("beta1"));
  cfg.beta2 = std::stod(expect_field("beta2"));
  cfg.beta3 = std::stod(expect_field("beta3"));
  cfg.p = std::stod(expect_field("p"));
  cfg.strategic_count = std::stoi(expect_field("strategic_count"));
  cfg.strategic_kind = candidate_kind_from_string(expect_field("strategic_kind"));
  cfg.seed = std::stoull(expect_field("seed"));

  PanderEnv env(cfg);
  env.round_ = std::stoi(expect_field("round"));
  env.done_ = std::stoi(expect_field("done")) != 0;
  env.profile_rng_ = RngStream::deserialize(expect_field("rng_profile"));
  env.truth_rng_ = RngStream::deserialize(expect_field("rng_truth"));
  env.elect_rng_ = RngStream::deserialize(expect_field("rng_elect"));
  env.majority_rng_ = RngStream::deserialize(expect_field("rng_majority"));
  env.outcome_rng_ = RngStream::deserialize(expect_field("rng_outcome"));
  env.majority_ = bits_from_string(expect_field("majority"));

  env.profile_.voters.clear();
  for (int v = 0; v < cfg.n; ++v)
    env.profile_.voters.push_back(bits_from_string(expect_field("voter")));

  env.candidates_.clear();
  for (int c = 0; c < cfg.m; ++c) {
    std::istringstream ls(expect_field("candidate"));
    std::string kind, cred, truth, report;
    if (!(ls >> kind >> cred >> truth >> report))
      throw std::invalid_argument("snapshot: bad candidate line");
    CandidateState cand;
    cand.id = c;
    cand.kind = candidate_kind_from_string(kind);
    cand.credibility = std::stod(cred);
    cand.truth = bits_from_string(truth);
    cand.report = bits_from_string(report);
    env.candidates_.push_back(std::move(cand));
  }
  return env;
}

}  // namespace pander
