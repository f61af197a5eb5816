#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pander/rng.hpp"

namespace pander {

// One binary stance per issue.
using Bit = std::uint8_t;
using IssueVector = std::vector<Bit>;

// Number of positions where x and y differ. Sizes must match.
int hamming(const IssueVector& x, const IssueVector& y);

// Fraction of positions where x and y agree: 1 - hamming/r.
double agreement(const IssueVector& x, const IssueVector& y);

// Preferences of every voter for one round.
struct RoundProfile {
  std::vector<IssueVector> voters;  // n rows of r bits each

  int voter_count() const { return static_cast<int>(voters.size()); }
  int issue_count() const {
    return voters.empty() ? 0 : static_cast<int>(voters[0].size());
  }
};

// r independent Bernoulli(p) bits.
IssueVector sample_issue_vector(int r, double p, RngStream& rng);

// n voters, r issues, each bit iid Bernoulli(p).
RoundProfile sample_profile(int n, int r, double p, RngStream& rng);

// Majority stance of the voters on issue t; exact ties resolved by a fair
// coin from tie_rng.
Bit voter_majority(const RoundProfile& profile, int t, RngStream& tie_rng);

// voter_majority applied to every issue, consuming tie draws in issue order.
IssueVector majority_vector(const RoundProfile& profile, RngStream& tie_rng);

enum class CandidateKind { Truthful, Selfish, Malicious };
enum class System { RD, FRD };

const char* to_string(CandidateKind kind);
const char* to_string(System system);
CandidateKind candidate_kind_from_string(const std::string& s);
System system_from_string(const std::string& s);

struct CandidateState {
  int id = 0;
  CandidateKind kind = CandidateKind::Truthful;
  IssueVector truth;    // private preferences this round
  IssueVector report;   // published preferences this round
  double credibility = 1.0;

  bool strategic() const { return kind != CandidateKind::Truthful; }
};

struct SystemConfig {
  int n = 50;           // voters
  int m = 10;           // candidates
  int k = 5;            // committee size
  int r = 9;            // issues per round
  int rounds = 100;     // episode length Q
  System system = System::RD;
  double beta1 = 0.95;  // pander penalty factor
  double beta2 = 0.003; // elected truthful-vote recovery rate
  double beta3 = 0.01;  // unelected recovery rate
  double p = 0.5;       // Bernoulli parameter for preference sampling
  int strategic_count = 0;
  CandidateKind strategic_kind = CandidateKind::Selfish;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument on any out-of-range field.
  void validate() const;
};

}  // namespace pander
