#pragma once

#include <vector>

#include "pander/core.hpp"
#include "pander/rng.hpp"

namespace pander {

struct SolverResult {
  IssueVector report;
  int approvals = 0;  // full-credibility approvals of `report` on the profile
  int lies = 0;       // hamming(report, truth); 0 for map_bruteforce
};

// Unconstrained pandering: the report maximizing the number of voters within
// Hamming distance < r/2. Exhaustive scan of all 2^r reports; ties broken
// toward the lexicographically smallest report. Throws std::invalid_argument
// for r > 22.
SolverResult map_bruteforce(const RoundProfile& profile);

// Credible pandering: same objective restricted to reports within Hamming
// distance `budget` of `truth`. Ties broken by (max approvals, then fewest
// lies, then lexicographically smallest report). Dispatches between the two
// strategies below based on ball size; both are exact and agree bit-for-bit.
// Throws std::invalid_argument if budget is outside [0, r] or r > 62.
SolverResult cmap_solve(const RoundProfile& profile, const IssueVector& truth,
                        int budget);

// Enumerates the entire Hamming ball around truth (sizes 0..budget, each
// size in ascending lexicographic order, which makes the tie-break free).
SolverResult cmap_enumerate_ball(const RoundProfile& profile,
                                 const IssueVector& truth, int budget);

// Depth-first search over report prefixes in lexicographic order with an
// admissible per-voter bound: voter v can still be won only if
// mismatches_so_far(v) + max(0, remaining_disagreements(v) - budget_left)
// stays under r/2. Prunes only when the bound rules out strictly improving
// (approvals, then lies), so results match ball enumeration exactly.
SolverResult cmap_branch_bound(const RoundProfile& profile,
                               const IssueVector& truth, int budget);

// Baseline report: the per-issue voter majority (ties from majority_rng).
IssueVector greedy_report(const RoundProfile& profile, RngStream& majority_rng);

// Baseline report: r fair coin flips, ignoring the profile.
IssueVector random_report(const IssueVector& truth, RngStream& rng);

// Uniform budget in [0, r] for the random-budget baseline.
int random_budget(int r, RngStream& rng);

}  // namespace pander
