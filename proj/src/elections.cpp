#include "pander/elections.hpp"

#include <algorithm>
#include <stdexcept>

namespace pander {

bool approves(const IssueVector& voter, const IssueVector& report,
              double credibility) {
  const int r = static_cast<int>(voter.size());
  const int d = hamming(voter, report);
  return 2.0 * static_cast<double>(r - d) * credibility > static_cast<double>(r);
}

ApprovalTally tally(const RoundProfile& profile,
                    const std::vector<IssueVector>& reports,
                    const std::vector<double>& credibilities) {
  if (reports.size() != credibilities.size())
    throw std::invalid_argument("tally: reports/credibilities size mismatch");
  ApprovalTally t;
  t.counts.assign(reports.size(), 0);
  for (const auto& voter : profile.voters) {
    for (std::size_t c = 0; c < reports.size(); ++c) {
      if (approves(voter, reports[c], credibilities[c])) ++t.counts[c];
    }
  }
  return t;
}

bool Committee::contains(int candidate) const {
  return std::binary_search(members.begin(), members.end(), candidate);
}

Committee elect_with_priority(const ApprovalTally& tally, int k,
                              const std::vector<int>& priority) {
  const int m = tally.candidate_count();
  if (k < 1 || k > m)
    throw std::invalid_argument("elect: need 1 <= k <= m");
  if (static_cast<int>(priority.size()) != m)
    throw std::invalid_argument("elect: priority size mismatch");

  std::vector<int> order(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) order[static_cast<std::size_t>(c)] = c;
  // (count desc, priority asc) is a total order since priority is a
  // permutation, so the result does not depend on sort stability.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (tally.counts[static_cast<std::size_t>(a)] != tally.counts[static_cast<std::size_t>(b)])
      return tally.counts[static_cast<std::size_t>(a)] > tally.counts[static_cast<std::size_t>(b)];
    return priority[static_cast<std::size_t>(a)] < priority[static_cast<std::size_t>(b)];
  });

  Committee committee;
  committee.members.assign(order.begin(), order.begin() + k);
  std::sort(committee.members.begin(), committee.members.end());
  return committee;
}

Committee elect(const ApprovalTally& tally, int k, RngStream& rng) {
  return elect_with_priority(tally, k, rng.permutation(tally.candidate_count()));
}

}  // namespace pander
