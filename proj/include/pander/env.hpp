#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pander/core.hpp"
#include "pander/elections.hpp"
#include "pander/governance.hpp"
#include "pander/rng.hpp"

namespace pander {

using Observation = std::vector<double>;

// What one strategic candidate does this round: either a pandering budget
// handed to the exact solver, or (for baselines that skip the solver) a
// direct report.
struct AgentAction {
  int budget = 0;
  std::optional<IssueVector> report;
};
using ActionProfile = std::vector<AgentAction>;  // one entry per strategic candidate

// Shape of the observation the environment emits.
//   Selfish (one per strategic candidate):
//     [issue support (r), own truth (r), own credibility, round fraction]
//   Malicious (single joint observation):
//     [issue support (r), credibility of each strategic candidate (|S|),
//      round fraction]
struct ObservationSpec {
  CandidateKind kind = CandidateKind::Selfish;
  int r = 0;
  int strategic_count = 0;

  int length() const {
    if (kind == CandidateKind::Malicious) return r + strategic_count + 1;
    return 2 * r + 2;
  }
};

struct StepResult {
  // Next observations (empty once the episode is done): one per selfish
  // strategic candidate, or a single joint one for malicious.
  std::vector<Observation> observations;
  std::vector<double> rewards;  // one per strategic candidate
  bool done = false;
  RoundLedger ledger;                    // actual round
  IssueVector counterfactual_outcomes;   // same round, all strategic honest
  Committee committee;                   // actual committee
  Committee counterfactual_committee;    // all-honest committee
  std::vector<std::uint8_t> elected_by_pandering;  // per strategic candidate
  IssueVector majority;  // resolved voter majority used this round
};

// True iff `candidate` made the committee with its submitted report but
// would not have with its truth substituted in, under the same approval
// inputs and frozen tie-break permutation.
bool elected_by_pandering(int candidate, const RoundProfile& profile,
                          const std::vector<IssueVector>& reports,
                          const IssueVector& truth,
                          const std::vector<double>& credibilities, int k,
                          const std::vector<int>& priority);

// Per-issue voter support: fraction of voters preferring 1 on each issue.
std::vector<double> issue_support(const RoundProfile& profile);

// One episode of the repeated election game as an RL environment. Strategic
// candidates occupy ids 0..strategic_count-1. Each step() runs one full
// round: reports, election, governance, credibility dynamics, and the
// honest counterfactual needed for rewards.
//
// Rewards:
//   selfish c:  1[elected by pandering] * (1 - d_H(outcomes, truth_c)/r)
//   malicious:  d_H(outcomes, counterfactual_outcomes)/r, shared
//
// The counterfactual branch replays the same round with every strategic
// candidate honest, from the same round-start credibilities, using the same
// frozen election permutation and a copy of the outcome tie-break stream, so
// with no pandering both branches are bit-identical.
class PanderEnv {
 public:
  explicit PanderEnv(const SystemConfig& cfg);

  std::vector<Observation> reset();
  StepResult step(const ActionProfile& actions);

  const SystemConfig& config() const { return cfg_; }
  const RoundProfile& profile() const { return profile_; }
  const IssueVector& majority() const { return majority_; }
  const std::vector<CandidateState>& candidates() const { return candidates_; }
  int round_index() const { return round_; }
  bool done() const { return done_; }

  // Number of observation/action slots: |S| for selfish, 1 joint slot for
  // malicious, 0 when nothing is strategic.
  int agent_slots() const;
  ObservationSpec observation_spec() const;
  std::vector<Observation> observations() const;

  // Full state as self-describing text; restore() resumes the exact episode.
  std::string snapshot() const;
  static PanderEnv restore(const std::string& text);

 private:
  void sample_round();

  SystemConfig cfg_;
  RngStream profile_rng_, truth_rng_, elect_rng_, majority_rng_, outcome_rng_;
  int round_ = 0;
  bool done_ = false;
  RoundProfile profile_;
  IssueVector majority_;
  std::vector<CandidateState> candidates_;
};

}  // namespace pander
