#include "pander/governance.hpp"

#include <cmath>
#include <stdexcept>

namespace pander {

namespace {
constexpr double kTieTol = 1e-9;
constexpr double kRowSumTol = 1e-9;
}  // namespace

Bit rd_decide(const std::vector<IssueVector>& member_truths, int t,
              RngStream& rng) {
  int ones = 0;
  for (const auto& truth : member_truths) ones += truth[static_cast<std::size_t>(t)];
  const int zeros = static_cast<int>(member_truths.size()) - ones;
  if (ones > zeros) return 1;
  if (ones < zeros) return 0;
  return rng.coin() ? 1 : 0;
}

double WeightMatrix::member_total(int j) const {
  double s = 0.0;
  for (int v = 0; v < voters; ++v) s += at(v, j);
  return s;
}

WeightMatrix frd_weights(const RoundProfile& profile,
                         const std::vector<IssueVector>& member_reports,
                         const std::vector<double>& member_credibilities,
                         int t) {
  const int k = static_cast<int>(member_reports.size());
  if (static_cast<int>(member_credibilities.size()) != k)
    throw std::invalid_argument("frd_weights: reports/credibilities size mismatch");
  const int n = profile.voter_count();

  WeightMatrix wm;
  wm.voters = n;
  wm.members = k;
  wm.w.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0.0);

  for (int v = 0; v < n; ++v) {
    const Bit stance = profile.voters[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)];
    double denom = 0.0;
    for (int j = 0; j < k; ++j) {
      if (member_reports[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] == stance)
        denom += member_credibilities[static_cast<std::size_t>(j)];
    }
    if (denom == 0.0) {
      // Nobody credible agrees with this voter: spread the weight uniformly.
      for (int j = 0; j < k; ++j) wm.at(v, j) = 1.0 / static_cast<double>(k);
    } else {
      for (int j = 0; j < k; ++j) {
        if (member_reports[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] == stance)
          wm.at(v, j) = member_credibilities[static_cast<std::size_t>(j)] / denom;
      }
    }
  }
  return wm;
}

Bit frd_decide(const WeightMatrix& weights,
               const std::vector<IssueVector>& member_truths, int t,
               RngStream& rng) {
  double weight_for_one = 0.0;
  for (int j = 0; j < weights.members; ++j) {
    if (member_truths[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] == 1)
      weight_for_one += weights.member_total(j);
  }
  const double half = static_cast<double>(weights.voters) / 2.0;
  if (weight_for_one > half + kTieTol) return 1;
  if (weight_for_one < half - kTieTol) return 0;
  return rng.coin() ? 1 : 0;
}

double credibility_after_vote(double h, bool pandered, double beta1,
                              double beta2) {
  return pandered ? h * beta1 : std::min((1.0 + beta2) * h, 1.0);
}

double credibility_unelected(double h, double beta3) {
  return std::min((1.0 + beta3) * h, 1.0);
}

namespace {

void check_credibility(double h) {
  if (!(h >= 0.0 && h <= 1.0))
    throw std::logic_error("run_round: credibility left [0, 1]");
}

}  // namespace

RoundLedger run_round(const SystemConfig& cfg, const RoundProfile& profile,
                      std::vector<CandidateState>& candidates,
                      const Committee& committee, RngStream& outcome_rng) {
  const int r = profile.issue_count();
  const int m = static_cast<int>(candidates.size());
  const int k = committee.size();

  std::vector<IssueVector> member_truths, member_reports;
  member_truths.reserve(static_cast<std::size_t>(k));
  member_reports.reserve(static_cast<std::size_t>(k));
  for (int id : committee.members) {
    member_truths.push_back(candidates[static_cast<std::size_t>(id)].truth);
    member_reports.push_back(candidates[static_cast<std::size_t>(id)].report);
  }

  RoundLedger ledger;
  ledger.outcomes.assign(static_cast<std::size_t>(r), 0);
  ledger.reveals.assign(static_cast<std::size_t>(k),
                        IssueVector(static_cast<std::size_t>(r), 0));
  ledger.credibility.assign(static_cast<std::size_t>(m),
                            std::vector<double>(static_cast<std::size_t>(r) + 2, 0.0));
  for (int c = 0; c < m; ++c) {
    check_credibility(candidates[static_cast<std::size_t>(c)].credibility);
    ledger.credibility[static_cast<std::size_t>(c)][0] =
        candidates[static_cast<std::size_t>(c)].credibility;
  }

  for (int t = 0; t < r; ++t) {
    Bit outcome;
    if (cfg.system == System::RD) {
      outcome = rd_decide(member_truths, t, outcome_rng);
    } else {
      std::vector<double> member_h(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j)
        member_h[static_cast<std::size_t>(j)] =
            candidates[static_cast<std::size_t>(committee.members[static_cast<std::size_t>(j)])].credibility;
      const WeightMatrix wm = frd_weights(profile, member_reports, member_h, t);
      for (int v = 0; v < wm.voters; ++v) {
        double row = 0.0;
        for (int j = 0; j < k; ++j) row += wm.at(v, j);
        if (std::abs(row - 1.0) > kRowSumTol)
          throw std::logic_error("run_round: FRD weight row does not sum to 1");
      }
      outcome = frd_decide(wm, member_truths, t, outcome_rng);
    }
    ledger.outcomes[static_cast<std::size_t>(t)] = outcome;

    // Voting on issue t reveals each member's stance; credibility reacts.
    for (int j = 0; j < k; ++j) {
      CandidateState& member =
          candidates[static_cast<std::size_t>(committee.members[static_cast<std::size_t>(j)])];
      const bool pandered =
          member.report[static_cast<std::size_t>(t)] != member.truth[static_cast<std::size_t>(t)];
      ledger.reveals[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] = pandered ? 1 : 0;
      member.credibility = credibility_after_vote(member.credibility, pandered,
                                                  cfg.beta1, cfg.beta2);
      check_credibility(member.credibility);
    }
    for (int c = 0; c < m; ++c)
      ledger.credibility[static_cast<std::size_t>(c)][static_cast<std::size_t>(t) + 1] =
          candidates[static_cast<std::size_t>(c)].credibility;
  }

  for (int c = 0; c < m; ++c) {
    if (!committee.contains(c)) {
      CandidateState& cand = candidates[static_cast<std::size_t>(c)];
      cand.credibility = credibility_unelected(cand.credibility, cfg.beta3);
      check_credibility(cand.credibility);
    }
    ledger.credibility[static_cast<std::size_t>(c)][static_cast<std::size_t>(r) + 1] =
        candidates[static_cast<std::size_t>(c)].credibility;
  }

  return ledger;
}

}  // namespace pander
