#pragma once

#include <vector>

#include "pander/core.hpp"
#include "pander/rng.hpp"

namespace pander {

// Approval rule: a voter approves a candidate iff
//   agreement(voter, report) * credibility > 1/2   (strictly).
// Evaluated as 2*(r - d)*h > r so the boundary case (e.g. agreement 5/9 at
// h = 0.9) is decided exactly, without the rounding noise of the
// fraction-first form.
bool approves(const IssueVector& voter, const IssueVector& report,
              double credibility);

struct ApprovalTally {
  std::vector<int> counts;  // one entry per candidate, 0..n

  int candidate_count() const { return static_cast<int>(counts.size()); }
};

// Approval counts for every candidate. reports and credibilities must have
// one entry per candidate.
ApprovalTally tally(const RoundProfile& profile,
                    const std::vector<IssueVector>& reports,
                    const std::vector<double>& credibilities);

struct Committee {
  std::vector<int> members;  // candidate ids, sorted ascending

  int size() const { return static_cast<int>(members.size()); }
  bool contains(int candidate) const;
};

// Top-k by approval count; candidates tied at the cut are ordered by
// `priority` (a permutation of 0..m-1; lower value wins). With a random
// permutation this makes tied candidates equally likely, and freezing the
// permutation lets counterfactual elections replay the same tie-breaks.
Committee elect_with_priority(const ApprovalTally& tally, int k,
                              const std::vector<int>& priority);

// Draws the tie-break permutation from rng, then selects as above.
Committee elect(const ApprovalTally& tally, int k, RngStream& rng);

}  // namespace pander
