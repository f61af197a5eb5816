#include "pander/solver.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace pander {

namespace {

// Reports are packed into u64 with element 0 in the MOST significant of the
// low r bits, so ascending numeric order == lexicographic order of vectors.
std::uint64_t to_revmask(const IssueVector& v) {
  std::uint64_t m = 0;
  for (Bit b : v) m = (m << 1) | (b & 1u);
  return m;
}

IssueVector from_revmask(std::uint64_t m, int r) {
  IssueVector v(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i)
    v[static_cast<std::size_t>(i)] = static_cast<Bit>((m >> (r - 1 - i)) & 1u);
  return v;
}

std::vector<std::uint64_t> voter_masks(const RoundProfile& profile) {
  std::vector<std::uint64_t> vs;
  vs.reserve(profile.voters.size());
  for (const auto& voter : profile.voters) vs.push_back(to_revmask(voter));
  return vs;
}

// Voter approves at full credibility iff 2*d < r.
int approvals_of(std::uint64_t report, const std::vector<std::uint64_t>& voters,
                 int r) {
  int count = 0;
  for (std::uint64_t vm : voters)
    count += 2 * std::popcount(report ^ vm) < r;
  return count;
}

// Next mask with the same popcount (Gosper / HAKMEM 175). v != 0.
std::uint64_t next_combination(std::uint64_t v) {
  const std::uint64_t t = v | (v - 1);
  const std::uint64_t lo = (t + 1) & ~t;
  return (t + 1) | ((lo - 1) >> (std::countr_zero(v) + 1));
}

constexpr std::uint64_t kBallEnumerationLimit = 1u << 20;

// Ball size sum_{i<=budget} C(r, i), saturating at the enumeration limit.
std::uint64_t saturating_ball_size(int r, int budget) {
  std::uint64_t total = 0;
  std::uint64_t c = 1;  // C(r, 0)
  for (int i = 0; i <= budget; ++i) {
    total += c;
    if (total > kBallEnumerationLimit || c > kBallEnumerationLimit)
      return kBallEnumerationLimit + 1;
    c = c * static_cast<std::uint64_t>(r - i) / static_cast<std::uint64_t>(i + 1);
  }
  return total;
}

void check_cmap_args(const RoundProfile& profile, const IssueVector& truth,
                     int budget) {
  const int r = static_cast<int>(truth.size());
  if (r < 1 || r > 62)
    throw std::invalid_argument("cmap: supported issue counts are 1..62");
  if (profile.issue_count() != r)
    throw std::invalid_argument("cmap: truth/profile issue count mismatch");
  if (budget < 0 || budget > r)
    throw std::invalid_argument("cmap: budget must be in [0, r]");
}

}  // namespace

SolverResult map_bruteforce(const RoundProfile& profile) {
  const int r = profile.issue_count();
  if (r < 1 || r > 22)
    throw std::invalid_argument("map_bruteforce: supported issue counts are 1..22");
  const auto voters = voter_masks(profile);

  std::uint64_t best_mask = 0;
  int best_approvals = -1;
  for (std::uint64_t mask = 0; mask < (1ULL << r); ++mask) {
    const int a = approvals_of(mask, voters, r);
    if (a > best_approvals) {  // ascending scan: first hit is lex-smallest
      best_approvals = a;
      best_mask = mask;
    }
  }
  return {from_revmask(best_mask, r), best_approvals, 0};
}

SolverResult cmap_enumerate_ball(const RoundProfile& profile,
                                 const IssueVector& truth, int budget) {
  check_cmap_args(profile, truth, budget);
  const int r = static_cast<int>(truth.size());
  const auto voters = voter_masks(profile);
  const std::uint64_t truth_mask = to_revmask(truth);

  std::uint64_t best_mask = truth_mask;
  int best_approvals = approvals_of(truth_mask, voters, r);
  int best_lies = 0;

  for (int s = 1; s <= budget; ++s) {
    // Flip-sets of size s in ascending order; report order is not monotone
    // in the flip-set, so lex ties need the explicit mask comparison.
    for (std::uint64_t f = (1ULL << s) - 1; f < (1ULL << r);
         f = next_combination(f)) {
      const std::uint64_t report = truth_mask ^ f;
      const int a = approvals_of(report, voters, r);
      if (a > best_approvals ||
          (a == best_approvals && s == best_lies && report < best_mask)) {
        best_approvals = a;
        best_mask = report;
        best_lies = s;
      }
    }
  }
  return {from_revmask(best_mask, r), best_approvals, best_lies};
}

namespace {

struct BnbState {
  const RoundProfile* profile = nullptr;
  const IssueVector* truth = nullptr;
  int r = 0;
  int n = 0;
  int budget = 0;
  // disag_suffix[v][pos]: positions >= pos where voter v disagrees with truth.
  std::vector<std::vector<int>> disag_suffix;
  std::vector<int> mismatches;  // per voter, over positions < pos
  IssueVector prefix;

  int best_approvals = -1;
  int best_lies = 0;
  IssueVector best_report;

  void dfs(int pos, int lies_used) {
    if (pos == r) {
      int a = 0;
      for (int v = 0; v < n; ++v) a += 2 * mismatches[static_cast<std::size_t>(v)] < r;
      // Leaves arrive in lex order, so strict improvement keeps the
      // lex-smallest among (approvals, lies) ties.
      if (a > best_approvals || (a == best_approvals && lies_used < best_lies)) {
        best_approvals = a;
        best_lies = lies_used;
        best_report = prefix;
      }
      return;
    }

    const int budget_left = budget - lies_used;
    int upper = 0;
    for (int v = 0; v < n; ++v) {
      const int unavoidable =
          disag_suffix[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos)] - budget_left;
      const int floor_dist =
          mismatches[static_cast<std::size_t>(v)] + (unavoidable > 0 ? unavoidable : 0);
      upper += 2 * floor_dist < r;
    }
    if (upper < best_approvals) return;
    if (upper == best_approvals && lies_used >= best_lies) return;

    for (Bit b = 0; b <= 1; ++b) {
      const bool lie = b != (*truth)[static_cast<std::size_t>(pos)];
      if (lie && lies_used == budget) continue;
      prefix[static_cast<std::size_t>(pos)] = b;
      for (int v = 0; v < n; ++v)
        mismatches[static_cast<std::size_t>(v)] +=
            profile->voters[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos)] != b;
      dfs(pos + 1, lies_used + (lie ? 1 : 0));
      for (int v = 0; v < n; ++v)
        mismatches[static_cast<std::size_t>(v)] -=
            profile->voters[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos)] != b;
    }
  }
};

}  // namespace

SolverResult cmap_branch_bound(const RoundProfile& profile,
                               const IssueVector& truth, int budget) {
  check_cmap_args(profile, truth, budget);
  BnbState st;
  st.profile = &profile;
  st.truth = &truth;
  st.r = static_cast<int>(truth.size());
  st.n = profile.voter_count();
  st.budget = budget;
  st.disag_suffix.assign(static_cast<std::size_t>(st.n),
                         std::vector<int>(static_cast<std::size_t>(st.r) + 1, 0));
  for (int v = 0; v < st.n; ++v)
    for (int pos = st.r - 1; pos >= 0; --pos)
      st.disag_suffix[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos)] =
          st.disag_suffix[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos) + 1] +
          (profile.voters[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos)] !=
           truth[static_cast<std::size_t>(pos)]);
  st.mismatches.assign(static_cast<std::size_t>(st.n), 0);
  st.prefix.assign(static_cast<std::size_t>(st.r), 0);

  // Seed with the honest report: no later leaf can beat it without strictly
  // more approvals (only the truth itself has zero lies), which sharpens the
  // bound from the start.
  {
    const auto voters = voter_masks(profile);
    st.best_report = truth;
    st.best_approvals = approvals_of(to_revmask(truth), voters, st.r);
    st.best_lies = 0;
  }

  st.dfs(0, 0);
  return {st.best_report, st.best_approvals, st.best_lies};
}

SolverResult cmap_solve(const RoundProfile& profile, const IssueVector& truth,
                        int budget) {
  check_cmap_args(profile, truth, budget);
  const int r = static_cast<int>(truth.size());
  if (saturating_ball_size(r, budget) <= kBallEnumerationLimit)
    return cmap_enumerate_ball(profile, truth, budget);
  return cmap_branch_bound(profile, truth, budget);
}

IssueVector greedy_report(const RoundProfile& profile, RngStream& majority_rng) {
  return majority_vector(profile, majority_rng);
}

IssueVector random_report(const IssueVector& truth, RngStream& rng) {
  IssueVector report(truth.size());
  for (auto& b : report) b = rng.coin() ? 1 : 0;
  return report;
}

int random_budget(int r, RngStream& rng) {
  return rng.uniform_int(0, r);
}

}  // namespace pander
