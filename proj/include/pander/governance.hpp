#pragma once

#include <vector>

#include "pander/core.hpp"
#include "pander/elections.hpp"
#include "pander/rng.hpp"

namespace pander {

// RD: unweighted majority of the committee members' true stances on issue t.
// Exact ties (even committees) resolved by a fair coin from rng.
Bit rd_decide(const std::vector<IssueVector>& member_truths, int t,
              RngStream& rng);

// Per-voter weights over committee members, row-major voters x members.
struct WeightMatrix {
  int voters = 0;
  int members = 0;
  std::vector<double> w;

  double at(int v, int j) const {
    return w[static_cast<std::size_t>(v) * static_cast<std::size_t>(members) +
             static_cast<std::size_t>(j)];
  }
  double& at(int v, int j) {
    return w[static_cast<std::size_t>(v) * static_cast<std::size_t>(members) +
             static_cast<std::size_t>(j)];
  }
  // Column sum: total voting weight delegated to member j.
  double member_total(int j) const;
};

// FRD delegation on issue t. Each voter splits a unit of weight across the
// committee members whose *reported* stance on t matches the voter's,
// proportionally to current credibility:
//   w(v, j) = 1[report_j(t) == v(t)] * h_j / sum_j' 1[...] * h_j'
// and uniformly (1/k) when that denominator is exactly zero. Rows sum to 1.
WeightMatrix frd_weights(const RoundProfile& profile,
                         const std::vector<IssueVector>& member_reports,
                         const std::vector<double>& member_credibilities,
                         int t);

// FRD outcome on issue t: 1 iff the weight behind stance 1 (members vote
// their *true* preference, each carrying their delegated total) exceeds n/2.
// |sum - n/2| <= 1e-9 counts as a tie and is resolved by a fair coin.
Bit frd_decide(const WeightMatrix& weights,
               const std::vector<IssueVector>& member_truths, int t,
               RngStream& rng);

// Credibility of an elected member after voting on one issue:
// pandered (report != truth on that issue) -> h * beta1,
// truthful -> min((1 + beta2) * h, 1).
double credibility_after_vote(double h, bool pandered, double beta1,
                              double beta2);

// End-of-round recovery for candidates left off the committee:
// min((1 + beta3) * h, 1).
double credibility_unelected(double h, double beta3);

// Everything downstream needs from one governance round.
struct RoundLedger {
  IssueVector outcomes;  // r decided issues
  // Committee-member pander flags per issue (reveals[j][t] == 1 iff member j
  // misreported issue t), ordered like Committee::members.
  std::vector<IssueVector> reveals;
  // credibility[c][s]: candidate c's credibility after s issue votes
  // (column 0 = round start, column r+1 = after end-of-round recovery).
  std::vector<std::vector<double>> credibility;
};

// Runs one full round: decides all r issues in order, applying per-issue
// credibility updates to committee members (in RD too -- credibility always
// evolves, it just does not weight RD votes), then end-of-round recovery to
// everyone else. Uses cfg.system and the beta parameters; mutates candidates'
// credibility in place and reads their current truth/report. Throws
// std::logic_error if any invariant breaks (credibility outside [0,1], FRD
// weight row not summing to 1).
RoundLedger run_round(const SystemConfig& cfg, const RoundProfile& profile,
                      std::vector<CandidateState>& candidates,
                      const Committee& committee, RngStream& outcome_rng);

}  // namespace pander
